#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "c0dyn/io.hpp"
#include "c0dyn/witness.hpp"

using namespace c0dyn;

namespace {

BaseSet roundtrip(const BaseSet& s) { return io::parse_base_set(io::to_string(s)); }

}  // namespace

TEST_CASE("rational text round trips") {
    for (const char* lit : {"3/4", "-7/2", "0/1", "12/1"}) {
        const Rational r = Rational::parse(lit);
        CHECK(io::to_string(r) == lit);
        CHECK(Rational::parse(io::to_string(r)) == r);
    }
    CHECK(io::to_string(Rational::parse("6/8")) == "3/4");
    CHECK(io::to_string(Rational::parse("5")) == "5/1");
}

TEST_CASE("measure value text") {
    CHECK(io::to_string(MeasureValue::exact(Rational(1, 3))) == "1/3");
    CHECK(io::to_string(MeasureValue::interval(Rational(1, 4), Rational(1, 2))) ==
          "[1/4, 1/2]");
}

TEST_CASE("cylinder literals") {
    CHECK(io::to_string(BaseSet(CylinderUnion::empty())) == "cyl empty");
    CHECK(io::to_string(BaseSet(CylinderUnion::full())) == "cyl full");
    CHECK(io::to_string(BaseSet(CylinderUnion::single(2, true))) == "cyl 2:1");
    CHECK(io::parse_base_set("cyl empty") == BaseSet(CylinderUnion::empty()));
    CHECK(io::parse_base_set("cyl full") == BaseSet(CylinderUnion::full()));
    CHECK(io::parse_base_set("cyl -3:0") == BaseSet(CylinderUnion::single(-3, false)));

    // clauses on partial supports expand against the union support
    const auto s = io::parse_base_set("cyl 0:1 | 1:1");
    CHECK(nu(s) == Rational(3, 4));
    CHECK(s == boolean(BoolOp::unite, BaseSet(CylinderUnion::single(0, true)),
                       BaseSet(CylinderUnion::single(1, true))));

    // a contradictory clause contributes nothing
    CHECK(io::parse_base_set("cyl 0:1 0:0 | 1:1") ==
          BaseSet(CylinderUnion::single(1, true)));

    // both values of an irrelevant coordinate collapse away
    CHECK(io::parse_base_set("cyl 0:1 1:0 | 0:1 1:1") ==
          BaseSet(CylinderUnion::single(0, true)));
}

TEST_CASE("arc and majority literals") {
    const BaseSet half{ArcUnion::interval(Rational(0), Rational(1, 2))};
    CHECK(io::to_string(half) == "arc 0/1 1/2");
    CHECK(io::parse_base_set("arc 0/1 1/2") == half);
    CHECK(io::parse_base_set("arc empty") == BaseSet(ArcUnion::empty()));

    std::vector<Arc> arcs{{Rational(0), Rational(1, 4)}, {Rational(1, 2), Rational(5, 8)}};
    const BaseSet pair{ArcUnion(arcs)};
    CHECK(io::to_string(pair) == "arc 0/1 1/4; 1/2 5/8");
    CHECK(roundtrip(pair) == pair);

    CHECK(io::to_string(BaseSet(MajoritySet(3))) == "maj 3");
    CHECK(io::to_string(BaseSet(MajoritySet(3, -2))) == "maj 3 @ -2");
    CHECK(io::parse_base_set("maj 3 @ -2") == BaseSet(MajoritySet(3, -2)));
    CHECK(io::parse_base_set(" maj 5 ") == BaseSet(MajoritySet(5)));
}

TEST_CASE("base set literal errors") {
    for (const char* bad :
         {"", "blob 1", "cyl", "cyl 0", "cyl 0:2", "cyl x:1", "arc", "arc 1/2",
          "arc 0/1 1/2 3/4", "maj", "maj 2 @", "maj 2 # 3", "maj 0"}) {
        INFO(bad);
        CHECK_THROWS_AS(io::parse_base_set(bad), std::invalid_argument);
    }
}

TEST_CASE("random cylinder round trips") {
    std::mt19937_64 rng(20240817);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::int64_t> support;
        for (std::int64_t c = -2; c <= 3; ++c)
            if (rng() & 1) support.push_back(c);
        std::vector<std::uint64_t> clauses;
        const std::uint64_t limit = std::uint64_t{1} << support.size();
        for (std::uint64_t m = 0; m < limit; ++m)
            if (rng() % 3 == 0) clauses.push_back(m);
        const BaseSet s{CylinderUnion(support, clauses)};
        CHECK(roundtrip(s) == s);
    }
}

TEST_CASE("rectangle literals") {
    auto sched = build_schedule(3, 2);
    const Rectangle xm = witness_support(sched, 2);
    CHECK(io::to_string(xm) == "rect head=[] tail=schedule(2)");
    CHECK(io::parse_rectangle("rect head=[] tail=schedule(2)", sched) == xm);

    const Rectangle shifted = diag_act(GroupElement::shift(-4), xm);
    CHECK(io::to_string(shifted) == "rect head=[] tail=schedule(2) @ -4");
    CHECK(io::parse_rectangle(io::to_string(shifted), sched) == shifted);

    const Rectangle mixed({BaseSet(MajoritySet(1)), BaseSet(CylinderUnion::single(2, true))},
                          TailContext::schedule(sched, 1));
    CHECK(io::to_string(mixed) == "rect head=[maj 1; cyl 2:1] tail=schedule(1)");
    CHECK(io::parse_rectangle(io::to_string(mixed), sched) == mixed);

    const Rectangle half({BaseSet(CylinderUnion::single(1, false))},
                         TailContext::half(BaseSet(CylinderUnion::single(0, true))));
    CHECK(io::to_string(half) == "rect head=[cyl 1:0] tail=half(cyl 0:1)");
    CHECK(io::parse_rectangle(io::to_string(half)) == half);

    // a shifted half tail folds the shift into the designated set
    const Rectangle moved = diag_act(GroupElement::shift(2), half);
    CHECK(io::to_string(moved) ==
          "rect head=[cyl 3:0] tail=half(cyl 2:1)");
    const Rectangle reread = io::parse_rectangle(io::to_string(moved));
    CHECK(rect_measure(reread) == rect_measure(moved));
    for (std::int64_t k = 1; k <= 3; ++k) CHECK(reread.factor(k) == moved.factor(k));

    // head factors equal to the tail trim back out on parse
    const Rectangle padded = io::parse_rectangle(
        "rect head=[maj " + std::to_string(sched->at(1, 2).n) + "] tail=schedule(2)", sched);
    CHECK(padded == xm);
}

TEST_CASE("rectangle literal errors") {
    auto sched = build_schedule(2, 1);
    for (const char* bad :
         {"head=[] tail=schedule(1)", "rect head=[ tail=schedule(1)",
          "rect head=[] schedule(1)", "rect head=[] tail=schedule(1",
          "rect head=[] tail=box(1)", "rect head=[] tail=schedule(x)",
          "rect head=[] tail=schedule(1) @ x", "rect head=[arc 0/1 1/2] tail=schedule(1)"}) {
        INFO(bad);
        CHECK_THROWS_AS(io::parse_rectangle(bad, sched), std::invalid_argument);
    }
    CHECK_THROWS_AS(io::parse_rectangle("rect head=[] tail=schedule(1)", nullptr),
                    std::invalid_argument);
    CHECK_THROWS_AS(io::parse_rectangle("rect head=[] tail=schedule(7)", sched),
                    std::out_of_range);
    CHECK_THROWS_AS(io::parse_rectangle("rect head=[] tail=half(cyl 0:1 1:1)"),
                    std::invalid_argument);
}
