#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>

#include "c0dyn/product_space.hpp"

using namespace c0dyn;

namespace {

BaseSet bit0() { return BaseSet(CylinderUnion::single(0, true)); }
BaseSet bits01() { return BaseSet(CylinderUnion({0, 1}, {0b11})); }

TailContext half_tail() { return TailContext::half(bit0()); }

Rectangle pure_tail() { return Rectangle({}, half_tail()); }

std::shared_ptr<const WitnessSchedule> toy_schedule() {
    std::vector<ScheduleEntry> entries;
    for (std::int64_t n : {1, 2, 6}) {
        ScheduleEntry e;
        e.n = n;
        e.max_symdiff = symdiff_shift(n, 1);
        e.slack = e.max_symdiff + Rational(1, 100);
        e.exp_enclosure = Enclosure(Rational(1) - e.slack, Rational(1) - e.max_symdiff);
        entries.push_back(std::move(e));
    }
    return std::make_shared<WitnessSchedule>(3, 1, std::move(entries));
}

// uniformly random sub-cylinder of `parent` (never empty)
BaseSet random_subset(const BaseSet& parent, std::mt19937_64& rng) {
    const auto& c = parent.as_cylinder();
    std::vector<std::uint64_t> kept;
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto m : c.clauses())
        if (coin(rng)) kept.push_back(m);
    if (kept.empty()) kept.push_back(c.clauses()[rng() % c.clauses().size()]);
    return BaseSet(CylinderUnion(c.support(), std::move(kept)));
}

BaseSet random_positive_cylinder(std::mt19937_64& rng, std::int64_t coord_lo, std::int64_t coord_hi) {
    std::uniform_int_distribution<std::int64_t> coord(coord_lo, coord_hi);
    std::vector<std::int64_t> supp = {coord(rng)};
    if (coord(rng) % 2 == 0) {
        auto c2 = coord(rng);
        if (c2 != supp[0]) supp.push_back(c2);
    }
    std::sort(supp.begin(), supp.end());
    const std::uint64_t total = std::uint64_t{1} << supp.size();
    std::vector<std::uint64_t> clauses;
    std::uniform_int_distribution<int> keep(0, 2);
    for (std::uint64_t m = 0; m < total; ++m)
        if (keep(rng) == 0) clauses.push_back(m);
    if (clauses.empty()) clauses.push_back(total - 1);
    return BaseSet(CylinderUnion(std::move(supp), std::move(clauses)));
}

}  // namespace

TEST_CASE("tail context") {
    REQUIRE_THROWS_AS(TailContext::half(bits01()), std::invalid_argument);
    auto t = half_tail();
    REQUIRE(t.is_half());
    REQUIRE(t.factor(1) == bit0());
    REQUIRE(t.factor(7) == bit0());

    auto shifted = t.shifted(GroupElement::shift(2));
    REQUIRE(shifted.factor(1) == BaseSet(CylinderUnion::single(2, true)));
    auto back = shifted.shifted(GroupElement::shift(-2));
    REQUIRE(back == t);

    auto sched = toy_schedule();
    auto ts = TailContext::schedule(sched, 1);
    REQUIRE(ts.factor(1) == BaseSet(MajoritySet(1)));
    REQUIRE(ts.factor(3) == BaseSet(MajoritySet(6)));
    REQUIRE(!ts.has_factor(4));
    REQUIRE_THROWS_AS(ts.factor(4), std::out_of_range);
    REQUIRE_THROWS_AS(TailContext::schedule(sched, 2), std::out_of_range);
    REQUIRE_THROWS_AS(TailContext::schedule(nullptr, 1), std::invalid_argument);
}

TEST_CASE("rectangle canonical form and factors") {
    auto r = Rectangle({bit0()}, half_tail());
    REQUIRE(r == pure_tail());
    REQUIRE(r.head_size() == 0);

    auto sched = toy_schedule();
    auto xs = Rectangle({}, TailContext::schedule(sched, 1));
    REQUIRE(Rectangle({BaseSet(MajoritySet(1))}, TailContext::schedule(sched, 1)) == xs);

    auto deep = Rectangle({bits01()}, half_tail());
    REQUIRE(deep.head_size() == 1);
    REQUIRE(deep.factor(1) == bits01());
    REQUIRE(deep.factor(2) == bit0());
    REQUIRE_THROWS_AS(deep.factor(0), std::out_of_range);
    REQUIRE_THROWS_AS(Rectangle({BaseSet(ArcUnion::full())}, half_tail()),
                      std::invalid_argument);
}

TEST_CASE("rectangle measure") {
    REQUIRE(rect_measure(pure_tail()) == Rational(1));
    REQUIRE(rect_measure(Rectangle({bits01()}, half_tail())) == Rational(1, 2));
    REQUIRE(rect_measure(Rectangle({bit0(), bit0()}, half_tail())) == Rational(1));
    REQUIRE(rect_measure(Rectangle({bits01(), bits01()}, half_tail())) == Rational(1, 4));
    REQUIRE(rect_measure(Rectangle({BaseSet(CylinderUnion::empty())}, half_tail())) ==
            Rational(0));
    auto sched = toy_schedule();
    REQUIRE(rect_measure(Rectangle({}, TailContext::schedule(sched, 1))) == Rational(1));
}

TEST_CASE("diagonal action on rectangles") {
    auto a = Rectangle({bits01()}, half_tail());
    auto g = GroupElement::shift(3);
    auto moved = diag_act(g, a);
    REQUIRE(rect_measure(moved) == rect_measure(a));
    REQUIRE(moved.factor(1) == act(g, bits01()));
    REQUIRE(moved.factor(2) == act(g, bit0()));
    REQUIRE(diag_act(g.inverse(), moved) == a);
    REQUIRE(diag_act(GroupElement::identity(Model::bernoulli), a) == a);
}

TEST_CASE("rectangle intersection and difference") {
    auto t = half_tail();
    auto b = pure_tail();
    auto a = Rectangle({bits01()}, t);

    auto meet = rect_intersect(a, b);
    REQUIRE(meet.has_value());
    REQUIRE(*meet == a);

    REQUIRE(rect_minus(a, a).empty());
    auto off = Rectangle({BaseSet(CylinderUnion::single(0, false))}, t);
    REQUIRE(!rect_intersect(a, off).has_value());
    REQUIRE(rect_minus(a, off) == std::vector<Rectangle>{a});

    // staircase: removing a two-coordinate sub-rectangle from the pure tail
    auto deep = Rectangle({bits01(), bits01()}, t);
    auto pieces = rect_minus(b, deep);
    REQUIRE(pieces.size() == 2);
    Rational total(0);
    for (const auto& p : pieces) total += rect_measure(p);
    REQUIRE(total == Rational(3, 4));
    REQUIRE(rect_measure(b) - rect_measure(deep) == Rational(3, 4));
    REQUIRE(disjoint_coordinate(pieces[0], pieces[1]).has_value());

    auto other = Rectangle({}, TailContext::half(BaseSet(CylinderUnion::single(1, true))));
    REQUIRE_THROWS_AS(rect_intersect(a, other), std::invalid_argument);
}

TEST_CASE("ring normalization") {
    auto t = half_tail();
    auto b = pure_tail();
    auto a = Rectangle({bits01(), bits01()}, t);

    auto same = ring_normalize(SetExpr::intersect(SetExpr::leaf(a), SetExpr::leaf(b)));
    REQUIRE(same.pieces() == std::vector<Rectangle>{a});

    auto nothing = ring_normalize(SetExpr::minus(SetExpr::leaf(a), SetExpr::leaf(a)));
    REQUIRE(nothing.empty());
    REQUIRE(mu(nothing) == Rational(0));

    auto diff = ring_normalize(SetExpr::minus(SetExpr::leaf(b), SetExpr::leaf(a)));
    REQUIRE(mu(diff) == Rational(3, 4));
    for (const auto& c : diff.certificates()) {
        auto x = diff.pieces()[c.i].factor(c.coordinate);
        auto y = diff.pieces()[c.j].factor(c.coordinate);
        REQUIRE(is_empty(boolean(BoolOp::intersect, x, y)));
    }

    auto rejoined = ring_normalize(
        SetExpr::disjoint_union(SetExpr::leaf(a), SetExpr::minus(SetExpr::leaf(b), SetExpr::leaf(a))));
    REQUIRE(mu(rejoined) == Rational(1));

    REQUIRE_THROWS_AS(ring_normalize(SetExpr::disjoint_union(SetExpr::leaf(b), SetExpr::leaf(a))),
                      std::invalid_argument);
}

TEST_CASE("measure is additive and shift invariant on the ring") {
    std::mt19937_64 rng(0x5eed0003);
    auto t = half_tail();
    for (int it = 0; it < 60; ++it) {
        std::vector<BaseSet> ha, hb;
        std::uniform_int_distribution<int> len(0, 3);
        for (int i = len(rng); i > 0; --i) ha.push_back(random_positive_cylinder(rng, -2, 2));
        for (int i = len(rng); i > 0; --i) hb.push_back(random_positive_cylinder(rng, -2, 2));
        Rectangle a(std::move(ha), t), b(std::move(hb), t);

        auto meet = ring_normalize(SetExpr::intersect(SetExpr::leaf(a), SetExpr::leaf(b)));
        auto aonly = ring_normalize(SetExpr::minus(SetExpr::leaf(a), SetExpr::leaf(b)));
        REQUIRE(mu(meet) + mu(aonly) == mu(a));

        auto g = GroupElement::shift(static_cast<std::int64_t>(it % 9) - 4);
        REQUIRE(mu(diag_act(g, aonly)) == mu(aonly));
        REQUIRE(mu(diag_act(g, a)) == mu(a));
    }
}

TEST_CASE("conditional probability") {
    auto t = half_tail();
    auto b = Rectangle({bits01()}, t);
    auto whole = RingSet({b});
    REQUIRE(p_cond(b, whole) == Rational(1));
    REQUIRE(p_cond(b, RingSet()) == Rational(0));

    auto inner = Rectangle({bits01(), bits01()}, t);
    REQUIRE(p_cond(b, RingSet({inner})) == Rational(1, 2));

    auto outside = Rectangle({BaseSet(CylinderUnion::single(0, false))}, t);
    REQUIRE_THROWS_AS(p_cond(b, RingSet({outside})), std::invalid_argument);

    auto hollow = Rectangle({BaseSet(CylinderUnion::empty())}, t);
    REQUIRE_THROWS_AS(p_cond(hollow, whole), std::invalid_argument);
}

TEST_CASE("conditional probabilities agree across conditioning rectangles") {
    std::mt19937_64 rng(0x5eed0004);
    auto t = half_tail();
    for (int it = 0; it < 100; ++it) {
        std::uniform_int_distribution<int> len(1, 4);
        const int hb = len(rng), hc = len(rng);
        std::vector<BaseSet> headb, headc;
        for (int i = 0; i < hb; ++i) headb.push_back(random_positive_cylinder(rng, -2, 2));
        for (int i = 0; i < hc; ++i) headc.push_back(random_positive_cylinder(rng, -2, 2));
        Rectangle b(headb, t), c(headc, t);

        // A sits inside B intersect C by construction
        const std::int64_t L = std::max(b.head_size(), c.head_size());
        std::vector<BaseSet> heada;
        bool fine = true;
        for (std::int64_t k = 1; k <= L && fine; ++k) {
            auto common = boolean(BoolOp::intersect, b.factor(k), c.factor(k));
            if (is_empty(common))
                fine = false;
            else
                heada.push_back(random_subset(common, rng));
        }
        if (!fine) continue;
        RingSet a({Rectangle(std::move(heada), t)});
        REQUIRE(p_cond(b, a) * mu(b) == p_cond(c, a) * mu(c));
        REQUIRE(p_cond(b, a) * mu(b) == mu(a));
    }
}

TEST_CASE("c0 evaluation with half tails") {
    auto b = pure_tail();
    for (std::int64_t d : {1, 2, 5}) {
        auto res = c0_eval(GroupElement::shift(d), b, b, 8);
        REQUIRE(res.truncated == Rational::pow2(-8));
        REQUIRE(res.infinite == MeasureValue::exact(Rational(0)));
    }
    auto still = c0_eval(GroupElement::shift(0), b, b, 8);
    REQUIRE(still.truncated == Rational(1));
    REQUIRE(still.infinite == MeasureValue::exact(Rational(1)));

    auto a = Rectangle({bits01()}, half_tail());
    auto res = c0_eval(GroupElement::shift(0), a, a, 4);
    REQUIRE(res.truncated == Rational(1, 2));
    REQUIRE(res.infinite == MeasureValue::exact(Rational(1, 2)));

    REQUIRE_THROWS_AS(c0_eval(GroupElement::shift(1), a, b, 0), std::invalid_argument);
    auto sched = toy_schedule();
    auto xs = Rectangle({}, TailContext::schedule(sched, 1));
    REQUIRE_THROWS_AS(c0_eval(GroupElement::shift(1), a, xs, 3), std::invalid_argument);
}

TEST_CASE("c0 evaluation with schedule tails") {
    auto sched = toy_schedule();
    auto xs = Rectangle({}, TailContext::schedule(sched, 1));
    auto res = c0_eval(GroupElement::shift(1), xs, xs, 3);
    Rational expect = (Rational(2) * overlap(1, 1)) * (Rational(2) * overlap(2, 1)) *
                      (Rational(2) * overlap(6, 1));
    REQUIRE(res.truncated == expect);
    REQUIRE(!res.infinite.is_exact());
    REQUIRE(res.infinite.lower() == Rational(0));
    REQUIRE(res.infinite.upper() == expect);

    auto fixed = c0_eval(GroupElement::shift(0), xs, xs, 3);
    REQUIRE(fixed.truncated == Rational(1));
    REQUIRE(fixed.infinite == MeasureValue::exact(Rational(1)));

    // relative shift zero after compensating tail shifts
    auto moved = diag_act(GroupElement::shift(2), xs);
    auto rel0 = c0_eval(GroupElement::shift(-2), moved, xs, 3);
    REQUIRE(rel0.infinite == MeasureValue::exact(Rational(1)));
}

TEST_CASE("c0 threshold certificates") {
    auto b = pure_tail();
    auto w = c0_threshold(b, b, Rational(1, 8), 3);
    REQUIRE(w == CompactWindow::shifts(1));
    // beyond the window the evaluation really is below eps
    for (std::int64_t g : {1, 2, 7}) {
        auto res = c0_eval(GroupElement::shift(g), b, b, 3);
        REQUIRE(res.truncated <= Rational(1, 8));
    }
    REQUIRE(c0_threshold(b, b, Rational(2), 3) == CompactWindow::shifts(0));
    REQUIRE_THROWS_AS(c0_threshold(b, b, Rational(1, 32), 3), std::invalid_argument);
    REQUIRE_THROWS_AS(c0_threshold(b, b, Rational(0), 3), std::invalid_argument);

    // an uncontrolled head factor contributes its mass but no window
    auto a = Rectangle({bits01()}, half_tail());
    REQUIRE(rect_measure(a) == Rational(1, 2));
    REQUIRE(c0_threshold(a, a, Rational(1, 4), 3) == CompactWindow::shifts(1));

    auto far = Rectangle({BaseSet(CylinderUnion::single(5, true))}, half_tail());
    REQUIRE(c0_threshold(far, far, Rational(1, 2), 3) == CompactWindow::shifts(1));

    auto empty_head = Rectangle({BaseSet(CylinderUnion::empty())}, half_tail());
    REQUIRE(c0_threshold(empty_head, b, Rational(1, 100), 3) == CompactWindow::shifts(0));
}

TEST_CASE("disjoint family") {
    auto fam1 = disjoint_family(1, bit0());
    REQUIRE(fam1.pieces().size() == 2);
    REQUIRE(mu(fam1) == Rational(2));

    auto fam3 = disjoint_family(3, bit0());
    REQUIRE(fam3.pieces().size() == 8);
    REQUIRE(fam3.certificates().size() == 28);
    for (const auto& p : fam3.pieces()) REQUIRE(rect_measure(p) == Rational(1));
    for (const auto& c : fam3.certificates()) {
        auto x = fam3.pieces()[c.i].factor(c.coordinate);
        auto y = fam3.pieces()[c.j].factor(c.coordinate);
        REQUIRE(is_empty(boolean(BoolOp::intersect, x, y)));
    }

    REQUIRE_THROWS_AS(disjoint_family(1, bits01()), std::invalid_argument);
    REQUIRE_THROWS_AS(disjoint_family(11, bit0()), std::invalid_argument);
    REQUIRE_THROWS_AS(disjoint_family(0, bit0()), std::invalid_argument);
}
