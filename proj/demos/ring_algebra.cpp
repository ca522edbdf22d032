// Rectangle algebra on the infinite product space: measures, staircase
// differences, conditional measures, and a taste of non sigma finiteness.

#include <cstdio>
#include <string>

#include "c0dyn/io.hpp"

using namespace c0dyn;

namespace {

void show(const char* label, const Rational& value) {
    std::printf("%-34s %s (= %.5f)\n", label, io::to_string(value).c_str(),
                value.to_double());
}

}  // namespace

int main() {
    const Rectangle a = io::parse_rectangle("rect head=[cyl 0:1] tail=half(cyl 0:1)");
    const Rectangle b = io::parse_rectangle("rect head=[cyl 0:1 1:1] tail=half(cyl 0:1)");

    show("mu(A)", rect_measure(a));
    show("mu(B)", rect_measure(b));

    const RingSet diff = ring_normalize(SetExpr::minus(SetExpr::leaf(a), SetExpr::leaf(b)));
    show("mu(A \\ B)", mu(diff));
    for (const auto& piece : diff.pieces())
        std::printf("  piece: %s\n", io::to_string(piece).c_str());

    const RingSet eb({b});
    show("P_A(B)", p_cond(a, eb));
    show("P_A(B) mu(A)", p_cond(a, eb) * rect_measure(a));

    const Rectangle moved = diag_act(GroupElement::shift(3), a);
    std::printf("shifted copy: %s\n", io::to_string(moved).c_str());
    show("mu(3 + A)", rect_measure(moved));

    const auto family = disjoint_family(4, BaseSet(CylinderUnion::single(0, true)));
    std::printf("\n%zu pairwise disjoint rectangles, each of measure one:\n",
                family.pieces().size());
    for (std::size_t i = 0; i < 3; ++i)
        std::printf("  %s\n", io::to_string(family.pieces()[i]).c_str());
    std::printf("  ... and %zu more; mu of the union = %s\n", family.pieces().size() - 3,
                io::to_string(mu(family)).c_str());
    return 0;
}
