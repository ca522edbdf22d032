#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "c0dyn/base_models.hpp"
#include "c0dyn/majority.hpp"
#include "c0dyn/rational.hpp"
#include "c0dyn/schedule.hpp"

namespace c0dyn {

// Describes every coordinate of a rectangle beyond its explicit head. A
// half tail repeats one designated base set of measure 1/2; a schedule
// tail places the majority set A_{n(k,m)} at coordinate k. The context
// also carries the accumulated group shift applied by diagonal actions.
class TailContext {
public:
    static TailContext half(BaseSet designated) {
        if (nu(designated) != Rational(1, 2))
            throw std::invalid_argument("TailContext: designated set must have measure 1/2");
        const Model model = designated.model();
        return TailContext(std::move(designated), nullptr, 0, GroupElement::identity(model));
    }

    static TailContext schedule(std::shared_ptr<const WitnessSchedule> sched, std::int64_t m) {
        if (!sched) throw std::invalid_argument("TailContext: null schedule");
        if (m < 1 || m > sched->m_max())
            throw std::out_of_range("TailContext: m outside the built schedule");
        return TailContext(std::nullopt, std::move(sched), m,
                           GroupElement::identity(Model::bernoulli));
    }

    bool is_half() const { return designated_.has_value(); }
    bool is_schedule() const { return !is_half(); }
    const BaseSet& designated() const { return *designated_; }
    const std::shared_ptr<const WitnessSchedule>& schedule_ref() const { return schedule_; }
    std::int64_t witness_index() const { return m_; }
    const GroupElement& shift() const { return shift_; }
    Model model() const { return shift_.model(); }

    TailContext shifted(const GroupElement& g) const {
        TailContext t = *this;
        t.shift_ = g.after(shift_);
        return t;
    }

    // Whether factor(k) is defined; schedule tails are truncated at k_max.
    bool has_factor(std::int64_t k) const {
        return k >= 1 && (is_half() || k <= schedule_->k_max());
    }

    BaseSet factor(std::int64_t k) const {
        if (k < 1) throw std::out_of_range("TailContext: coordinates start at 1");
        if (is_half()) return act(shift_, *designated_);
        if (k > schedule_->k_max())
            throw std::out_of_range("TailContext: coordinate beyond the built schedule");
        return BaseSet(MajoritySet(schedule_->at(k, m_).n, shift_.shift_amount()));
    }

    friend bool operator==(const TailContext& a, const TailContext& b) {
        if (a.is_half() != b.is_half() || a.shift_ != b.shift_ || a.m_ != b.m_) return false;
        if (a.is_half()) return *a.designated_ == *b.designated_;
        return a.schedule_ == b.schedule_ || *a.schedule_ == *b.schedule_;
    }

private:
    TailContext(std::optional<BaseSet> designated, std::shared_ptr<const WitnessSchedule> sched,
                std::int64_t m, GroupElement shift)
        : designated_(std::move(designated)),
          schedule_(std::move(sched)),
          m_(m),
          shift_(std::move(shift)) {}

    std::optional<BaseSet> designated_;
    std::shared_ptr<const WitnessSchedule> schedule_;
    std::int64_t m_;
    GroupElement shift_;
};

// Product set: finitely many explicit head factors, every later coordinate
// supplied by the tail context. Canonical form trims trailing head factors
// that merely restate what the tail supplies.
class Rectangle {
public:
    Rectangle(std::vector<BaseSet> head, TailContext tail,
              std::optional<std::int64_t> depth_hint = std::nullopt)
        : head_(std::move(head)), tail_(std::move(tail)), depth_hint_(depth_hint) {
        for (const auto& f : head_)
            if (f.model() != tail_.model())
                throw std::invalid_argument("Rectangle: head factor model differs from tail");
        while (!head_.empty()) {
            const auto k = static_cast<std::int64_t>(head_.size());
            if (!tail_.has_factor(k) || !(head_.back() == tail_.factor(k))) break;
            head_.pop_back();
        }
    }

    const std::vector<BaseSet>& head() const { return head_; }
    const TailContext& tail() const { return tail_; }
    std::int64_t head_size() const { return static_cast<std::int64_t>(head_.size()); }
    std::optional<std::int64_t> depth_hint() const { return depth_hint_; }
    Model model() const { return tail_.model(); }

    BaseSet factor(std::int64_t k) const {
        if (k < 1) throw std::out_of_range("Rectangle: coordinates start at 1");
        if (k <= head_size()) return head_[static_cast<std::size_t>(k - 1)];
        return tail_.factor(k);
    }

    bool has_empty_factor() const {
        for (const auto& f : head_)
            if (is_empty(f)) return true;
        return false;
    }

    friend bool operator==(const Rectangle& a, const Rectangle& b) {
        return a.head_ == b.head_ && a.tail_ == b.tail_;
    }

private:
    std::vector<BaseSet> head_;
    TailContext tail_;
    std::optional<std::int64_t> depth_hint_;
};

// mu of a rectangle: product of 2 nu(A_k) over the head; tail factors
// contribute exactly 1 because their measure is pinned at 1/2.
inline Rational rect_measure(const Rectangle& r) {
    Rational m(1);
    for (const auto& f : r.head()) m *= Rational(2) * nu(f);
    return m;
}

inline Rectangle diag_act(const GroupElement& g, const Rectangle& r) {
    if (g.model() != r.model())
        throw std::invalid_argument("diag_act: group element from the wrong model");
    std::vector<BaseSet> head;
    head.reserve(r.head().size());
    for (const auto& f : r.head()) head.push_back(act(g, f));
    return Rectangle(std::move(head), r.tail().shifted(g), r.depth_hint());
}

namespace detail {

inline void require_same_tail(const Rectangle& a, const Rectangle& b, const char* who) {
    if (!(a.tail() == b.tail()))
        throw std::invalid_argument(std::string(who) + ": rectangles have different tails");
}

}  // namespace detail

// First coordinate on which the two rectangles have disjoint factors, if
// any. Rectangles intersect coordinate-wise, so such a coordinate is a
// complete disjointness certificate; with equal tails none can exist past
// the heads.
inline std::optional<std::int64_t> disjoint_coordinate(const Rectangle& a, const Rectangle& b,
                                                       int cap = kDefaultLoweringCap) {
    detail::require_same_tail(a, b, "disjoint_coordinate");
    const std::int64_t L = std::max(a.head_size(), b.head_size());
    for (std::int64_t k = 1; k <= L; ++k)
        if (is_empty(boolean(BoolOp::intersect, a.factor(k), b.factor(k), cap))) return k;
    return std::nullopt;
}

inline std::optional<Rectangle> rect_intersect(const Rectangle& a, const Rectangle& b,
                                               int cap = kDefaultLoweringCap) {
    detail::require_same_tail(a, b, "rect_intersect");
    const std::int64_t L = std::max(a.head_size(), b.head_size());
    std::vector<BaseSet> head;
    head.reserve(static_cast<std::size_t>(L));
    for (std::int64_t k = 1; k <= L; ++k) {
        BaseSet f = boolean(BoolOp::intersect, a.factor(k), b.factor(k), cap);
        if (is_empty(f)) return std::nullopt;
        head.push_back(std::move(f));
    }
    return Rectangle(std::move(head), a.tail());
}

// Difference as a staircase of disjoint rectangles: the i-th piece agrees
// with the intersection on coordinates before i and avoids it exactly at i.
inline std::vector<Rectangle> rect_minus(const Rectangle& a, const Rectangle& b,
                                         int cap = kDefaultLoweringCap) {
    detail::require_same_tail(a, b, "rect_minus");
    const std::int64_t L = std::max(a.head_size(), b.head_size());
    std::vector<BaseSet> common;
    common.reserve(static_cast<std::size_t>(L));
    for (std::int64_t k = 1; k <= L; ++k) {
        BaseSet f = boolean(BoolOp::intersect, a.factor(k), b.factor(k), cap);
        if (is_empty(f)) return {a};
        common.push_back(std::move(f));
    }
    std::vector<Rectangle> pieces;
    for (std::int64_t i = 1; i <= L; ++i) {
        BaseSet gap = boolean(BoolOp::diff, a.factor(i), common[static_cast<std::size_t>(i - 1)], cap);
        if (is_empty(gap)) continue;
        std::vector<BaseSet> head(common.begin(), common.begin() + (i - 1));
        head.push_back(std::move(gap));
        for (std::int64_t k = i + 1; k <= L; ++k) head.push_back(a.factor(k));
        pieces.emplace_back(std::move(head), a.tail());
    }
    return pieces;
}

// Finite disjoint union of rectangles over one shared tail, with a recorded
// disjointness certificate for every pair.
class RingSet {
public:
    struct Cert {
        std::size_t i = 0;
        std::size_t j = 0;
        std::int64_t coordinate = 0;
        friend bool operator==(const Cert&, const Cert&) = default;
    };

    RingSet() = default;

    explicit RingSet(std::vector<Rectangle> pieces, int cap = kDefaultLoweringCap)
        : pieces_(std::move(pieces)) {
        std::erase_if(pieces_, [](const Rectangle& r) { return r.has_empty_factor(); });
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
                auto c = disjoint_coordinate(pieces_[i], pieces_[j], cap);
                if (!c)
                    throw std::invalid_argument("RingSet: pieces are not pairwise disjoint");
                certs_.push_back(Cert{i, j, *c});
            }
        }
    }

    const std::vector<Rectangle>& pieces() const { return pieces_; }
    const std::vector<Cert>& certificates() const { return certs_; }
    bool empty() const { return pieces_.empty(); }

    friend bool operator==(const RingSet& a, const RingSet& b) {
        return a.pieces_ == b.pieces_;
    }

private:
    std::vector<Rectangle> pieces_;
    std::vector<Cert> certs_;
};

inline Rational mu(const Rectangle& r) { return rect_measure(r); }

inline Rational mu(const RingSet& e) {
    Rational total(0);
    for (const auto& p : e.pieces()) total += rect_measure(p);
    return total;
}

inline RingSet diag_act(const GroupElement& g, const RingSet& e, int cap = kDefaultLoweringCap) {
    std::vector<Rectangle> pieces;
    pieces.reserve(e.pieces().size());
    for (const auto& p : e.pieces()) pieces.push_back(diag_act(g, p));
    return RingSet(std::move(pieces), cap);
}

// Expression over rectangles in the operations that stay inside the
// generated ring: intersection, difference, and disjoint union.
class SetExpr {
public:
    static SetExpr leaf(Rectangle r) {
        return SetExpr(std::make_shared<Node>(Node{Kind::leaf, std::move(r), {}, {}}));
    }
    static SetExpr intersect(SetExpr a, SetExpr b) {
        return combine(Kind::intersect, std::move(a), std::move(b));
    }
    static SetExpr minus(SetExpr a, SetExpr b) {
        return combine(Kind::minus, std::move(a), std::move(b));
    }
    static SetExpr disjoint_union(SetExpr a, SetExpr b) {
        return combine(Kind::disjoint_union, std::move(a), std::move(b));
    }

    friend RingSet ring_normalize(const SetExpr& e, int cap);

private:
    enum class Kind { leaf, intersect, minus, disjoint_union };
    struct Node {
        Kind kind;
        std::optional<Rectangle> rect;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    explicit SetExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static SetExpr combine(Kind k, SetExpr a, SetExpr b) {
        return SetExpr(std::make_shared<Node>(
            Node{k, std::nullopt, std::move(a.node_), std::move(b.node_)}));
    }

    static std::vector<Rectangle> normalize(const Node& n, int cap) {
        switch (n.kind) {
            case Kind::leaf:
                return n.rect->has_empty_factor() ? std::vector<Rectangle>{}
                                                  : std::vector<Rectangle>{*n.rect};
            case Kind::intersect: {
                std::vector<Rectangle> out;
                for (const auto& p : normalize(*n.lhs, cap))
                    for (const auto& q : normalize(*n.rhs, cap))
                        if (auto r = rect_intersect(p, q, cap)) out.push_back(std::move(*r));
                return out;
            }
            case Kind::minus: {
                std::vector<Rectangle> current = normalize(*n.lhs, cap);
                for (const auto& q : normalize(*n.rhs, cap)) {
                    std::vector<Rectangle> next;
                    for (const auto& p : current) {
                        auto split = rect_minus(p, q, cap);
                        next.insert(next.end(), std::make_move_iterator(split.begin()),
                                    std::make_move_iterator(split.end()));
                    }
                    current = std::move(next);
                }
                return current;
            }
            case Kind::disjoint_union: {
                std::vector<Rectangle> out = normalize(*n.lhs, cap);
                auto rhs = normalize(*n.rhs, cap);
                for (const auto& p : out)
                    for (const auto& q : rhs)
                        if (!disjoint_coordinate(p, q, cap))
                            throw std::invalid_argument(
                                "ring_normalize: disjoint_union operands overlap");
                out.insert(out.end(), std::make_move_iterator(rhs.begin()),
                           std::make_move_iterator(rhs.end()));
                return out;
            }
        }
        throw std::logic_error("ring_normalize: bad node");
    }

    std::shared_ptr<const Node> node_;
};

inline RingSet ring_normalize(const SetExpr& e, int cap = kDefaultLoweringCap) {
    return RingSet(SetExpr::normalize(*e.node_, cap), cap);
}

// Conditional probability P_B(E) for E a ring set contained in the
// rectangle B: sum over pieces of the per-coordinate mass ratios. Requires
// every head factor of B to have positive measure and E to sit inside B
// coordinate-wise.
inline Rational p_cond(const Rectangle& b, const RingSet& e, int cap = kDefaultLoweringCap) {
    for (const auto& f : b.head())
        if (nu(f).is_zero())
            throw std::invalid_argument("p_cond: conditioning factor has measure zero");
    Rational total(0);
    for (const auto& piece : e.pieces()) {
        detail::require_same_tail(piece, b, "p_cond");
        const std::int64_t L = std::max(piece.head_size(), b.head_size());
        Rational term(1);
        for (std::int64_t k = 1; k <= L; ++k) {
            const BaseSet pf = piece.factor(k);
            const BaseSet bf = b.factor(k);
            if (!is_subset(pf, bf, cap))
                throw std::invalid_argument("p_cond: set not contained in the conditioning rectangle");
            term *= nu(boolean(BoolOp::intersect, pf, bf, cap)) / nu(bf);
        }
        total += term;
    }
    return total;
}

namespace detail {

// nu of the intersection of two base sets, using the overlap recurrence
// when both are majority sets of the same index (any window size, no
// lowering) and explicit set algebra otherwise.
inline Rational pair_intersection_nu(const BaseSet& x, const BaseSet& y, int cap) {
    if (x.is_majority() && y.is_majority() && x.as_majority().n == y.as_majority().n) {
        const std::int64_t d = x.as_majority().offset - y.as_majority().offset;
        return overlap(x.as_majority().n, d < 0 ? -d : d);
    }
    return nu(boolean(BoolOp::intersect, x, y, cap));
}

}  // namespace detail

struct C0Result {
    Rational truncated;
    MeasureValue infinite = MeasureValue::exact(Rational(0));
};

// Evaluates mu(gA intersect B) through depth D as the partial product of
// normalized factor overlaps 2 nu(gA_k intersect B_k). The infinite value
// is exact whenever the tail factor pattern is eventually constant: a
// constant factor < 1 forces 0, a constant factor 1 freezes the partial
// product. Schedule tails with a nonzero relative shift only give the
// trivial bracket [0, truncated]; certified lower bounds for those come
// from the witness layer.
inline C0Result c0_eval(const GroupElement& g, const Rectangle& a, const Rectangle& b,
                        std::int64_t depth, int cap = kDefaultLoweringCap) {
    if (g.model() != a.model() || a.model() != b.model())
        throw std::invalid_argument("c0_eval: mixed models");
    if (a.tail().is_half() != b.tail().is_half())
        throw std::invalid_argument("c0_eval: mixed tail families");
    if (depth < std::max(a.head_size(), b.head_size()))
        throw std::invalid_argument("c0_eval: depth must cover both heads");

    Rational truncated(1);
    for (std::int64_t k = 1; k <= depth; ++k)
        truncated *= Rational(2) *
                     detail::pair_intersection_nu(act(g, a.factor(k)), b.factor(k), cap);

    if (a.tail().is_half()) {
        const Rational f_tail =
            Rational(2) * detail::pair_intersection_nu(act(g, a.tail().factor(depth + 1)),
                                                       b.tail().factor(depth + 1), cap);
        return {truncated, f_tail == Rational(1) ? MeasureValue::exact(truncated)
                                                 : MeasureValue::exact(Rational(0))};
    }
    if (!(*a.tail().schedule_ref() == *b.tail().schedule_ref()) ||
        a.tail().witness_index() != b.tail().witness_index())
        throw std::invalid_argument("c0_eval: schedule tails disagree");
    const std::int64_t rel = g.shift_amount() + a.tail().shift().shift_amount() -
                             b.tail().shift().shift_amount();
    if (rel == 0) return {truncated, MeasureValue::exact(truncated)};
    return {truncated, MeasureValue::interval(Rational(0), truncated)};
}

// Window radius r with mu(gA intersect B) <= eps for every shift |g| >= r,
// certified factor by factor: j coordinates where both sides carry measure
// one half become exact quarter overlaps past their mixing thresholds and
// the rest never exceed their unshifted mass.
inline CompactWindow c0_threshold(const Rectangle& a, const Rectangle& b, const Rational& eps,
                                  std::int64_t depth) {
    if (a.model() != Model::bernoulli || b.model() != Model::bernoulli)
        throw std::invalid_argument("c0_threshold: shift model only");
    if (eps.sign() <= 0) throw std::invalid_argument("c0_threshold: eps must be positive");
    if (depth < std::max(a.head_size(), b.head_size()))
        throw std::invalid_argument("c0_threshold: depth must cover both heads");

    const Rational total = rect_measure(a);
    std::int64_t j = 0;
    Rational bound = total;
    while (bound > eps) {
        bound /= Rational(2);
        ++j;
    }
    if (j == 0) return CompactWindow::shifts(0);

    std::vector<std::int64_t> thresholds;
    const Rational half(1, 2);
    for (std::int64_t k = 1; k <= depth; ++k) {
        const BaseSet af = a.factor(k);
        const BaseSet bf = b.factor(k);
        if (nu(af) == half && nu(bf) == half)
            thresholds.push_back(mixing_threshold(af, bf));
    }
    if (static_cast<std::int64_t>(thresholds.size()) < j)
        throw std::invalid_argument(
            "c0_threshold: depth hosts too few measure-controlled factor pairs for this eps");
    std::sort(thresholds.begin(), thresholds.end());
    return CompactWindow::shifts(thresholds[static_cast<std::size_t>(j - 1)]);
}

// The 2^N rectangles obtained by choosing, on each of the first N
// coordinates, either A or its complement, all over the half tail on A.
// Every pair differs on some chosen coordinate, so the family is pairwise
// disjoint while each member keeps measure 1.
inline RingSet disjoint_family(std::int64_t n_coords, const BaseSet& a,
                               int cap = kDefaultLoweringCap, std::int64_t n_cap = 10) {
    if (nu(a) != Rational(1, 2))
        throw std::invalid_argument("disjoint_family: base set must have measure 1/2");
    if (n_coords < 1 || n_coords > n_cap)
        throw std::invalid_argument("disjoint_family: N outside [1, cap]");
    const BaseSet comp = complement(a, cap);
    const TailContext tail = TailContext::half(a);
    std::vector<Rectangle> pieces;
    pieces.reserve(std::size_t{1} << n_coords);
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << n_coords); ++pattern) {
        std::vector<BaseSet> head;
        head.reserve(static_cast<std::size_t>(n_coords));
        // coordinate 1 reads off the most significant chosen bit
        for (std::int64_t i = 0; i < n_coords; ++i)
            head.push_back(((pattern >> (n_coords - 1 - i)) & 1u) ? comp : a);
        pieces.emplace_back(std::move(head), tail);
    }
    return RingSet(std::move(pieces), cap);
}

}  // namespace c0dyn
