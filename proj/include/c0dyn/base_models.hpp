#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "c0dyn/rational.hpp"

namespace c0dyn {

enum class Model { bernoulli, circle };

// Raised when an operation would need to materialize more coordinates than
// the configured cap allows.
class lowering_cap_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultLoweringCap = 24;

struct ShiftBy {
    std::int64_t d = 0;
    friend bool operator==(const ShiftBy&, const ShiftBy&) = default;
};

struct RotateBy {
    Rational theta;  // in [0, 1)
    friend bool operator==(const RotateBy&, const RotateBy&) = default;
};

class GroupElement {
public:
    static GroupElement shift(std::int64_t d) { return GroupElement(ShiftBy{d}); }
    static GroupElement rotation(Rational theta) {
        // normalize into [0, 1)
        Rational t = std::move(theta);
        mpz_class num = t.numerator(), den = t.denominator();
        mpz_class m = num % den;
        if (m < 0) m += den;
        return GroupElement(RotateBy{Rational(m, den)});
    }
    static GroupElement identity(Model m) {
        return m == Model::bernoulli ? shift(0) : rotation(Rational(0));
    }

    Model model() const {
        return std::holds_alternative<ShiftBy>(v_) ? Model::bernoulli : Model::circle;
    }
    bool is_identity() const {
        if (const auto* s = std::get_if<ShiftBy>(&v_)) return s->d == 0;
        return std::get<RotateBy>(v_).theta.is_zero();
    }
    std::int64_t shift_amount() const {
        if (const auto* s = std::get_if<ShiftBy>(&v_)) return s->d;
        throw std::invalid_argument("GroupElement: not a shift");
    }
    const Rational& angle() const {
        if (const auto* r = std::get_if<RotateBy>(&v_)) return r->theta;
        throw std::invalid_argument("GroupElement: not a rotation");
    }

    GroupElement inverse() const {
        if (const auto* s = std::get_if<ShiftBy>(&v_)) return shift(-s->d);
        return rotation(-std::get<RotateBy>(v_).theta);
    }
    // Composition this * other (apply other first).
    GroupElement after(const GroupElement& other) const {
        if (model() != other.model())
            throw std::invalid_argument("GroupElement: model mismatch in composition");
        if (const auto* s = std::get_if<ShiftBy>(&v_))
            return shift(s->d + other.shift_amount());
        return rotation(std::get<RotateBy>(v_).theta + other.angle());
    }

    friend bool operator==(const GroupElement&, const GroupElement&) = default;

private:
    explicit GroupElement(std::variant<ShiftBy, RotateBy> v) : v_(std::move(v)) {}
    std::variant<ShiftBy, RotateBy> v_;
};

// Finite symmetric window of group elements. For shifts this is
// {-radius, ..., radius}; the rotation group is compact, so its window is
// the whole group and the radius carries no meaning.
struct CompactWindow {
    Model model = Model::bernoulli;
    std::int64_t radius = 0;

    static CompactWindow shifts(std::int64_t r) {
        if (r < 0) throw std::invalid_argument("CompactWindow: negative radius");
        return CompactWindow{Model::bernoulli, r};
    }
    static CompactWindow whole_circle() { return CompactWindow{Model::circle, 0}; }

    friend bool operator==(const CompactWindow&, const CompactWindow&) = default;
};

// Finite union of cylinders over {0,1}^Z, stored as a support (sorted
// coordinate list) plus the set of admissible bit patterns on it, one mask
// per pattern with bit i corresponding to support()[i]. Canonical form:
// masks sorted and distinct, no coordinate the pattern set is insensitive
// to, and the empty set carries an empty support.
class CylinderUnion {
public:
    CylinderUnion() = default;  // empty set

    CylinderUnion(std::vector<std::int64_t> support, std::vector<std::uint64_t> clauses)
        : support_(std::move(support)), clauses_(std::move(clauses)) {
        if (support_.size() > 63)
            throw lowering_cap_error("CylinderUnion: support wider than 63 coordinates");
        if (!std::is_sorted(support_.begin(), support_.end()) ||
            std::adjacent_find(support_.begin(), support_.end()) != support_.end())
            throw std::invalid_argument("CylinderUnion: support must be sorted and distinct");
        const std::uint64_t limit = support_.empty() ? 1 : (std::uint64_t{1} << support_.size());
        for (auto m : clauses_)
            if (m >= limit) throw std::invalid_argument("CylinderUnion: clause outside support");
        canonicalize();
    }

    static CylinderUnion empty() { return CylinderUnion(); }
    static CylinderUnion full() { return CylinderUnion({}, {0}); }
    static CylinderUnion single(std::int64_t coord, bool value) {
        return CylinderUnion({coord}, {value ? std::uint64_t{1} : std::uint64_t{0}});
    }

    const std::vector<std::int64_t>& support() const { return support_; }
    const std::vector<std::uint64_t>& clauses() const { return clauses_; }
    bool is_empty() const { return clauses_.empty(); }
    bool is_full() const { return support_.empty() && clauses_.size() == 1; }

    bool contains_clause(std::uint64_t mask) const {
        return std::binary_search(clauses_.begin(), clauses_.end(), mask);
    }

    friend bool operator==(const CylinderUnion&, const CylinderUnion&) = default;

private:
    void canonicalize() {
        std::sort(clauses_.begin(), clauses_.end());
        clauses_.erase(std::unique(clauses_.begin(), clauses_.end()), clauses_.end());
        if (clauses_.empty()) {
            support_.clear();
            return;
        }
        // Drop every coordinate the clause set is insensitive to; removing
        // one can expose another, so iterate to a fixed point.
        bool changed = true;
        while (changed && !support_.empty()) {
            changed = false;
            for (std::size_t i = 0; i < support_.size(); ++i) {
                const std::uint64_t bit = std::uint64_t{1} << i;
                bool insensitive = true;
                for (auto m : clauses_) {
                    if (!std::binary_search(clauses_.begin(), clauses_.end(), m ^ bit)) {
                        insensitive = false;
                        break;
                    }
                }
                if (!insensitive) continue;
                std::vector<std::uint64_t> projected;
                projected.reserve(clauses_.size() / 2);
                const std::uint64_t low = bit - 1;
                for (auto m : clauses_)
                    if (!(m & bit)) projected.push_back((m & low) | ((m >> 1) & ~low));
                clauses_ = std::move(projected);
                support_.erase(support_.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }

    std::vector<std::int64_t> support_;
    std::vector<std::uint64_t> clauses_;
};

// Half-open arc [lo, hi) with 0 <= lo < hi <= 1.
struct Arc {
    Rational lo;
    Rational hi;
    friend bool operator==(const Arc&, const Arc&) = default;
};

// Finite union of half-open arcs on the unit circle, kept sorted, pairwise
// disjoint, with touching arcs merged.
class ArcUnion {
public:
    ArcUnion() = default;  // empty set

    explicit ArcUnion(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
        for (const auto& a : arcs_) {
            if (a.lo.sign() < 0 || a.lo >= a.hi || a.hi > Rational(1))
                throw std::invalid_argument("ArcUnion: arc must satisfy 0 <= lo < hi <= 1");
        }
        std::sort(arcs_.begin(), arcs_.end(),
                  [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
        std::vector<Arc> merged;
        for (auto& a : arcs_) {
            if (!merged.empty() && a.lo < merged.back().hi)
                throw std::invalid_argument("ArcUnion: arcs overlap");
            if (!merged.empty() && a.lo == merged.back().hi)
                merged.back().hi = a.hi;
            else
                merged.push_back(a);
        }
        arcs_ = std::move(merged);
    }

    static ArcUnion empty() { return ArcUnion(); }
    static ArcUnion full() { return ArcUnion({Arc{Rational(0), Rational(1)}}); }
    static ArcUnion interval(Rational lo, Rational hi) { return ArcUnion({Arc{std::move(lo), std::move(hi)}}); }

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool is_empty() const { return arcs_.empty(); }
    bool is_full() const {
        return arcs_.size() == 1 && arcs_[0].lo.is_zero() && arcs_[0].hi == Rational(1);
    }

    bool contains_point(const Rational& p) const {
        for (const auto& a : arcs_)
            if (a.lo <= p && p < a.hi) return true;
        return false;
    }

    friend bool operator==(const ArcUnion&, const ArcUnion&) = default;

private:
    std::vector<Arc> arcs_;
};

// The set of bit sequences with a strict majority of ones on the window
// {offset, ..., offset + 2n}. Kept symbolic so shifts stay cheap at any n.
struct MajoritySet {
    std::int64_t n = 1;
    std::int64_t offset = 0;

    MajoritySet(std::int64_t n_, std::int64_t offset_ = 0) : n(n_), offset(offset_) {
        if (n < 1) throw std::invalid_argument("MajoritySet: n must be >= 1");
    }

    std::int64_t window_lo() const { return offset; }
    std::int64_t window_hi() const { return offset + 2 * n; }

    friend bool operator==(const MajoritySet&, const MajoritySet&) = default;
};

class BaseSet {
public:
    BaseSet(CylinderUnion c) : v_(std::move(c)) {}  // NOLINT: implicit by design
    BaseSet(ArcUnion a) : v_(std::move(a)) {}       // NOLINT
    BaseSet(MajoritySet m) : v_(std::move(m)) {}    // NOLINT

    Model model() const {
        return std::holds_alternative<ArcUnion>(v_) ? Model::circle : Model::bernoulli;
    }
    bool is_cylinder() const { return std::holds_alternative<CylinderUnion>(v_); }
    bool is_arc() const { return std::holds_alternative<ArcUnion>(v_); }
    bool is_majority() const { return std::holds_alternative<MajoritySet>(v_); }

    const CylinderUnion& as_cylinder() const { return std::get<CylinderUnion>(v_); }
    const ArcUnion& as_arc() const { return std::get<ArcUnion>(v_); }
    const MajoritySet& as_majority() const { return std::get<MajoritySet>(v_); }

    friend bool operator==(const BaseSet&, const BaseSet&) = default;

private:
    std::variant<CylinderUnion, ArcUnion, MajoritySet> v_;
};

enum class BoolOp { intersect, unite, diff, symdiff };

namespace detail {

inline bool bool_op_apply(BoolOp op, bool a, bool b) {
    switch (op) {
        case BoolOp::intersect: return a && b;
        case BoolOp::unite: return a || b;
        case BoolOp::diff: return a && !b;
        case BoolOp::symdiff: return a != b;
    }
    throw std::logic_error("bool_op_apply: bad op");
}

inline CylinderUnion lower_majority(const MajoritySet& m, int cap) {
    const std::int64_t width = 2 * m.n + 1;
    if (width > cap)
        throw lowering_cap_error("majority window exceeds lowering cap");
    std::vector<std::int64_t> support;
    support.reserve(static_cast<std::size_t>(width));
    for (std::int64_t c = m.window_lo(); c <= m.window_hi(); ++c) support.push_back(c);
    std::vector<std::uint64_t> clauses;
    const std::uint64_t total = std::uint64_t{1} << width;
    for (std::uint64_t mask = 0; mask < total; ++mask)
        if (std::popcount(mask) >= m.n + 1) clauses.push_back(mask);
    return CylinderUnion(std::move(support), std::move(clauses));
}

inline CylinderUnion cyl_boolean(BoolOp op, const CylinderUnion& a, const CylinderUnion& b,
                                 int cap) {
    std::vector<std::int64_t> u;
    std::set_union(a.support().begin(), a.support().end(), b.support().begin(),
                   b.support().end(), std::back_inserter(u));
    if (static_cast<int>(u.size()) > cap)
        throw lowering_cap_error("combined support exceeds lowering cap");
    auto positions = [&](const std::vector<std::int64_t>& supp) {
        std::vector<unsigned> pos(supp.size());
        for (std::size_t i = 0; i < supp.size(); ++i) {
            auto it = std::lower_bound(u.begin(), u.end(), supp[i]);
            pos[i] = static_cast<unsigned>(it - u.begin());
        }
        return pos;
    };
    const auto pa = positions(a.support());
    const auto pb = positions(b.support());
    auto restrict_mask = [](std::uint64_t m, const std::vector<unsigned>& pos) {
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < pos.size(); ++i)
            r |= ((m >> pos[i]) & 1u) << i;
        return r;
    };
    std::vector<std::uint64_t> out;
    const std::uint64_t total = u.empty() ? 1 : (std::uint64_t{1} << u.size());
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        const bool ina = a.contains_clause(restrict_mask(mask, pa));
        const bool inb = b.contains_clause(restrict_mask(mask, pb));
        if (bool_op_apply(op, ina, inb)) out.push_back(mask);
    }
    return CylinderUnion(std::move(u), std::move(out));
}

inline ArcUnion arc_boolean(BoolOp op, const ArcUnion& a, const ArcUnion& b) {
    std::vector<Rational> cuts = {Rational(0), Rational(1)};
    for (const auto& arc : a.arcs()) {
        cuts.push_back(arc.lo);
        cuts.push_back(arc.hi);
    }
    for (const auto& arc : b.arcs()) {
        cuts.push_back(arc.lo);
        cuts.push_back(arc.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Arc> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!bool_op_apply(op, a.contains_point(cuts[i]), b.contains_point(cuts[i]))) continue;
        if (!out.empty() && out.back().hi == cuts[i])
            out.back().hi = cuts[i + 1];
        else
            out.push_back(Arc{cuts[i], cuts[i + 1]});
    }
    return ArcUnion(std::move(out));
}

inline ArcUnion rotate(const ArcUnion& a, const Rational& theta) {
    std::vector<Arc> out;
    const Rational one(1);
    for (const auto& arc : a.arcs()) {
        Rational lo = arc.lo + theta;
        Rational hi = arc.hi + theta;
        if (lo >= one) {
            out.push_back(Arc{lo - one, hi - one});
        } else if (hi <= one) {
            out.push_back(Arc{lo, hi});
        } else {
            out.push_back(Arc{lo, one});
            out.push_back(Arc{Rational(0), hi - one});
        }
    }
    return ArcUnion(std::move(out));
}

}  // namespace detail

inline bool is_empty(const BaseSet& s) {
    if (s.is_cylinder()) return s.as_cylinder().is_empty();
    if (s.is_arc()) return s.as_arc().is_empty();
    return false;  // a majority set is never empty
}

inline bool is_full(const BaseSet& s) {
    if (s.is_cylinder()) return s.as_cylinder().is_full();
    if (s.is_arc()) return s.as_arc().is_full();
    return false;
}

// Probability of the set under the base measure: uniform product measure
// for bit sequences, Lebesgue length on the circle.
inline Rational nu(const BaseSet& s) {
    if (s.is_cylinder()) {
        const auto& c = s.as_cylinder();
        return Rational(mpz_class(static_cast<unsigned long>(c.clauses().size())),
                        mpz_class(1)) /
               Rational::pow2(static_cast<long>(c.support().size()));
    }
    if (s.is_arc()) {
        Rational total(0);
        for (const auto& a : s.as_arc().arcs()) total += a.hi - a.lo;
        return total;
    }
    // The binomial tail sum over j > n collapses to half the total mass by
    // the j <-> 2n+1-j reflection, independent of n.
    return Rational(1, 2);
}

// Group action on sets; the image of {x : x_j = v} under the shift g is
// {x : x_{j+g} = v}, i.e. supports move by +g.
inline BaseSet act(const GroupElement& g, const BaseSet& s) {
    if (g.model() != s.model())
        throw std::invalid_argument("act: group element and set from different models");
    if (s.is_cylinder()) {
        const auto d = g.shift_amount();
        auto supp = s.as_cylinder().support();
        for (auto& c : supp) c += d;
        return BaseSet(CylinderUnion(std::move(supp), s.as_cylinder().clauses()));
    }
    if (s.is_majority()) {
        const auto& m = s.as_majority();
        return BaseSet(MajoritySet(m.n, m.offset + g.shift_amount()));
    }
    return BaseSet(detail::rotate(s.as_arc(), g.angle()));
}

inline BaseSet boolean(BoolOp op, const BaseSet& a, const BaseSet& b,
                       int cap = kDefaultLoweringCap) {
    if (a.model() != b.model())
        throw std::invalid_argument("boolean: operands from different models");
    if (a.model() == Model::circle)
        return BaseSet(detail::arc_boolean(op, a.as_arc(), b.as_arc()));
    const CylinderUnion ca =
        a.is_cylinder() ? a.as_cylinder() : detail::lower_majority(a.as_majority(), cap);
    const CylinderUnion cb =
        b.is_cylinder() ? b.as_cylinder() : detail::lower_majority(b.as_majority(), cap);
    return BaseSet(detail::cyl_boolean(op, ca, cb, cap));
}

inline BaseSet complement(const BaseSet& s, int cap = kDefaultLoweringCap) {
    if (s.model() == Model::circle)
        return BaseSet(detail::arc_boolean(BoolOp::diff, ArcUnion::full(), s.as_arc()));
    const CylinderUnion c =
        s.is_cylinder() ? s.as_cylinder() : detail::lower_majority(s.as_majority(), cap);
    return BaseSet(detail::cyl_boolean(BoolOp::diff, CylinderUnion::full(), c, cap));
}

inline bool is_subset(const BaseSet& a, const BaseSet& b, int cap = kDefaultLoweringCap) {
    return is_empty(boolean(BoolOp::diff, a, b, cap));
}

namespace detail {

inline std::optional<std::pair<std::int64_t, std::int64_t>> support_range(const BaseSet& s) {
    if (s.is_majority()) {
        const auto& m = s.as_majority();
        return std::make_pair(m.window_lo(), m.window_hi());
    }
    const auto& supp = s.as_cylinder().support();
    if (supp.empty()) return std::nullopt;
    return std::make_pair(supp.front(), supp.back());
}

}  // namespace detail

// Smallest radius r such that for every shift |g| >= r the supports of gA
// and B are disjoint, which makes nu(gA intersect B) = nu(A) nu(B) exact.
// Sets with empty support (the empty and full sets) give 0.
inline std::int64_t mixing_threshold(const BaseSet& a, const BaseSet& b) {
    if (a.model() != Model::bernoulli || b.model() != Model::bernoulli)
        throw std::invalid_argument("mixing_threshold: shift model only");
    const auto ra = detail::support_range(a);
    const auto rb = detail::support_range(b);
    if (!ra || !rb) return 0;
    const std::int64_t up = rb->second - ra->first;    // largest intersecting g > 0 side
    const std::int64_t down = ra->second - rb->first;  // largest |g| on the g < 0 side
    return 1 + std::max(up, down);
}

}  // namespace c0dyn
