#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "c0dyn/base_models.hpp"
#include "c0dyn/majority.hpp"
#include "c0dyn/product_space.hpp"
#include "c0dyn/rational.hpp"
#include "c0dyn/schedule.hpp"

namespace c0dyn {

// Builds the witness schedule cell by cell. Cell (k, m) brackets
// e^{-1/(m 2^k)} to width 2^{-(k+m+4)}, budgets the slack 1 - lo from the
// lower endpoint, and picks the least majority index n whose worst
// symmetric difference over shifts |d| <= m fits the budget. The exact
// worst value is stored next to the budget so every certificate can be
// replayed without re-running the search.
inline std::shared_ptr<const WitnessSchedule> build_schedule(
    std::int64_t k_max, std::int64_t m_max, std::int64_t search_cap = std::int64_t{1} << 20,
    const std::optional<Rational>& slack_cap = std::nullopt) {
    if (k_max < 1 || m_max < 1)
        throw std::invalid_argument("build_schedule: bounds must be >= 1");
    std::vector<ScheduleEntry> entries;
    entries.reserve(static_cast<std::size_t>(k_max * m_max));
    for (std::int64_t k = 1; k <= k_max; ++k) {
        for (std::int64_t m = 1; m <= m_max; ++m) {
            const Rational x(1, m * (std::int64_t{1} << k));
            ScheduleEntry e;
            e.exp_enclosure = exp_neg_enclosure(x, Rational::pow2(-(k + m + 4)));
            e.slack = Rational(1) - e.exp_enclosure.lo;
            if (slack_cap && *slack_cap < e.slack) e.slack = *slack_cap;
            e.n = ai_find(m, e.slack, search_cap);
            e.max_symdiff = max_symdiff(e.n, m);
            entries.push_back(std::move(e));
        }
    }
    return std::make_shared<WitnessSchedule>(k_max, m_max, std::move(entries));
}

// The support rectangle X_m of the m-th witness vector: the full product
// over the scheduled majority sets.
inline Rectangle witness_support(std::shared_ptr<const WitnessSchedule> sched, std::int64_t m) {
    return Rectangle({}, TailContext::schedule(std::move(sched), m));
}

// Bounds mu(g X_m intersect X_m) evaluated to depth D. The upper bound is
// always the exact partial product of overlap factors. Inside the
// certified window |g| <= m the stored worst-case symmetric differences
// bound the factors between D and the end of the table, and every
// unbuilt factor beyond the table is at least 1 - 1/(m 2^k), so the whole
// far tail is at least 1 - 1/(m 2^k_max).
inline MeasureValue coefficient(const GroupElement& g, std::int64_t m, std::int64_t depth,
                                const std::shared_ptr<const WitnessSchedule>& sched) {
    if (!sched) throw std::invalid_argument("coefficient: null schedule");
    if (g.model() != Model::bernoulli)
        throw std::invalid_argument("coefficient: shift model only");
    if (m < 1 || m > sched->m_max())
        throw std::out_of_range("coefficient: m outside the built schedule");
    if (depth < 0 || depth > sched->k_max())
        throw std::out_of_range("coefficient: depth outside the built schedule");
    std::int64_t d = g.shift_amount();
    if (d < 0) d = -d;
    if (d == 0) return MeasureValue::exact(Rational(1));

    Rational upper(1);
    for (std::int64_t k = 1; k <= depth; ++k)
        upper *= Rational(2) * overlap(sched->at(k, m).n, d);
    if (d > m) return MeasureValue::interval(Rational(0), upper);

    Rational lower = upper;
    for (std::int64_t k = depth + 1; k <= sched->k_max(); ++k)
        lower *= Rational(1) - sched->at(k, m).max_symdiff;
    lower *= Rational(1) - Rational(1, m * (std::int64_t{1} << sched->k_max()));
    return MeasureValue::interval(lower, upper);
}

// Certificate that the factor overlaps of a rectangle converge to 1
// uniformly over a shift window, or a refutation index where they cannot.
// factor_lower_bounds[k-1] bounds min over the window of
// 2 nu(dA_k intersect A_k); tail_epsilons lists (N, eps_N) with
// prod_{k >= N} factor >= 1 - eps_N, the eps_N shrinking as N grows.
struct FcCheckResult {
    Rectangle target;
    CompactWindow window;
    bool certified = false;
    bool zero_measure = false;
    std::optional<std::int64_t> refuted_index;
    std::vector<Rational> factor_lower_bounds;
    std::vector<std::pair<std::int64_t, Rational>> tail_epsilons;
    std::optional<Rational> tail_product_lower;
};

namespace detail {

inline Rational window_min_factor(const BaseSet& f, std::int64_t radius, int cap) {
    Rational best(2);
    for (std::int64_t d = 0; d <= radius; ++d) {
        const Rational v =
            Rational(2) * pair_intersection_nu(act(GroupElement::shift(d), f), f, cap);
        if (v < best) best = v;
    }
    return best;
}

}  // namespace detail

inline FcCheckResult fc_check(const Rectangle& a, const CompactWindow& window,
                              int cap = kDefaultLoweringCap) {
    if (a.model() != Model::bernoulli || window.model != Model::bernoulli)
        throw std::invalid_argument("fc_check: shift model only");
    FcCheckResult res{a, window, false, false, std::nullopt, {}, {}, std::nullopt};
    if (rect_measure(a).is_zero()) {
        res.certified = true;
        res.zero_measure = true;
        return res;
    }
    const std::int64_t r = window.radius;
    const std::int64_t h = a.head_size();
    for (std::int64_t k = 1; k <= h; ++k)
        res.factor_lower_bounds.push_back(detail::window_min_factor(a.factor(k), r, cap));

    if (a.tail().is_half()) {
        const Rational tail_min = detail::window_min_factor(a.tail().factor(h + 1), r, cap);
        if (tail_min < Rational(1)) {
            res.refuted_index = h + 1;
            res.factor_lower_bounds.push_back(tail_min);
            return res;
        }
        res.certified = true;
        res.tail_product_lower = Rational(1);
        res.tail_epsilons.emplace_back(h + 1, Rational(0));
        return res;
    }

    const auto& sched = *a.tail().schedule_ref();
    const std::int64_t m = a.tail().witness_index();
    if (r > m)
        throw std::invalid_argument("fc_check: window exceeds the schedule's certified shifts");
    for (std::int64_t k = h + 1; k <= sched.k_max(); ++k)
        res.factor_lower_bounds.push_back(Rational(1) - sched.at(k, m).max_symdiff);

    // prod_{k >= N} factor >= 1 - eps_N: built cells contribute their exact
    // worst symmetric difference, everything past the table at most the
    // geometric remainder 1/(m 2^k_max).
    const Rational beyond(1, m * (std::int64_t{1} << sched.k_max()));
    for (std::int64_t n0 = h + 1; n0 <= sched.k_max() + 1; ++n0) {
        Rational eps = beyond;
        for (std::int64_t k = n0; k <= sched.k_max(); ++k) eps += sched.at(k, m).max_symdiff;
        res.tail_epsilons.emplace_back(n0, eps);
    }
    Rational tail_lo(1);
    for (std::int64_t k = h + 1; k <= sched.k_max(); ++k)
        tail_lo *= Rational(1) - sched.at(k, m).max_symdiff;
    tail_lo *= Rational(1) - beyond;
    res.tail_product_lower = tail_lo;
    res.certified = true;
    return res;
}

// Assembles a certificate for the coordinate-wise intersection of two
// certified targets over one window by multiplying per-index lower bounds.
inline FcCheckResult fc_intersection_assembly(const FcCheckResult& a, const FcCheckResult& b,
                                              int cap = kDefaultLoweringCap) {
    if (!(a.window == b.window))
        throw std::invalid_argument("fc_intersection_assembly: windows differ");
    if (!a.certified || !b.certified)
        throw std::invalid_argument("fc_intersection_assembly: both inputs must be certified");
    auto meet = rect_intersect(a.target, b.target, cap);
    if (a.zero_measure || b.zero_measure || !meet) {
        Rectangle empty_rect({BaseSet(CylinderUnion::empty())}, a.target.tail());
        FcCheckResult res{meet ? *meet : empty_rect, a.window, true, true,
                          std::nullopt,             {},       {},   std::nullopt};
        return res;
    }
    FcCheckResult res{*meet, a.window, true, false, std::nullopt, {}, {}, std::nullopt};
    const std::size_t len = std::max(a.factor_lower_bounds.size(), b.factor_lower_bounds.size());
    auto bound_at = [](const FcCheckResult& c, std::size_t i) {
        return i < c.factor_lower_bounds.size() ? c.factor_lower_bounds[i] : Rational(1);
    };
    for (std::size_t i = 0; i < len; ++i)
        res.factor_lower_bounds.push_back(bound_at(a, i) * bound_at(b, i));
    if (a.tail_product_lower && b.tail_product_lower)
        res.tail_product_lower = *a.tail_product_lower * *b.tail_product_lower;
    // 1 - l l' <= (1 - l) + (1 - l'), so epsilon schedules add
    for (const auto& [n0, eps_a] : a.tail_epsilons) {
        for (const auto& [n0_b, eps_b] : b.tail_epsilons) {
            if (n0_b == n0) {
                res.tail_epsilons.emplace_back(n0, eps_a + eps_b);
                break;
            }
        }
    }
    return res;
}

struct RotationReport {
    Rational theta;
    Rational overlap_nu;
    Rational factor;
    Rational truncated;
    MeasureValue infinite = MeasureValue::exact(Rational(0));
};

// Evaluates the diagonal rotation by theta on the full product over one
// circle set of measure 1/2. Any rotation that moves the base set at all
// kills every finite-measure overlap in the limit, however small theta is.
inline RotationReport rotation_counterexample(const Rational& theta, const BaseSet& a,
                                              std::int64_t depth) {
    if (a.model() != Model::circle)
        throw std::invalid_argument("rotation_counterexample: circle set required");
    if (nu(a) != Rational(1, 2))
        throw std::invalid_argument("rotation_counterexample: base set must have measure 1/2");
    if (depth < 1) throw std::invalid_argument("rotation_counterexample: depth must be >= 1");
    const GroupElement g = GroupElement::rotation(theta);
    const Rectangle rect({}, TailContext::half(a));
    const C0Result res = c0_eval(g, rect, rect, depth);
    RotationReport report;
    report.theta = g.angle();
    report.overlap_nu = nu(boolean(BoolOp::intersect, act(g, a), a));
    report.factor = Rational(2) * report.overlap_nu;
    report.truncated = res.truncated;
    report.infinite = res.infinite;
    return report;
}

// Finite cover of the orbit-saturated witness supports: every shifted copy
// g X_m for |g| <= radius and m <= m_used, each of measure exactly 1.
inline std::vector<Rectangle> sigma_finite_cover(
    const std::shared_ptr<const WitnessSchedule>& sched, std::int64_t radius,
    std::int64_t m_used) {
    if (!sched) throw std::invalid_argument("sigma_finite_cover: null schedule");
    if (radius < 0) throw std::invalid_argument("sigma_finite_cover: negative radius");
    if (m_used < 1 || m_used > sched->m_max())
        throw std::out_of_range("sigma_finite_cover: m outside the built schedule");
    std::vector<Rectangle> pieces;
    pieces.reserve(static_cast<std::size_t>((2 * radius + 1) * m_used));
    for (std::int64_t g = -radius; g <= radius; ++g)
        for (std::int64_t m = 1; m <= m_used; ++m)
            pieces.push_back(diag_act(GroupElement::shift(g), witness_support(sched, m)));
    return pieces;
}

struct SandwichRow {
    std::int64_t start = 0;
    Rational lower;
    Rational middle;
    Rational upper;
};

struct SandwichReport {
    bool preconditions_ok = false;
    std::optional<std::int64_t> violation_index;
    std::vector<SandwichRow> rows;
    bool sandwich_ok = false;
};

// Verifies x_k (1-a_k)^2 <= x_k - a_k <= x_k factor-wise products over
// every suffix start in [n0, n_max]. Index i of the input vectors holds
// term k = i + 1. Preconditions x_k > 2/3 and 0 <= a_k < 1/2 are scanned
// first; the report carries the first offending index instead of rows.
inline SandwichReport convergence_lemma_check(const std::vector<Rational>& xs,
                                              const std::vector<Rational>& as,
                                              std::int64_t n0, std::int64_t n_max) {
    if (xs.size() != as.size())
        throw std::invalid_argument("convergence_lemma_check: length mismatch");
    if (n0 < 1 || n_max < n0 || static_cast<std::size_t>(n_max) > xs.size())
        throw std::invalid_argument("convergence_lemma_check: bad index range");
    SandwichReport report;
    for (std::int64_t k = n0; k <= n_max; ++k) {
        const auto& x = xs[static_cast<std::size_t>(k - 1)];
        const auto& a = as[static_cast<std::size_t>(k - 1)];
        if (!(x > Rational(2, 3)) || a.sign() < 0 || !(a < Rational(1, 2))) {
            report.violation_index = k;
            return report;
        }
    }
    report.preconditions_ok = true;
    report.sandwich_ok = true;
    for (std::int64_t start = n0; start <= n_max; ++start) {
        SandwichRow row;
        row.start = start;
        row.lower = Rational(1);
        row.middle = Rational(1);
        row.upper = Rational(1);
        for (std::int64_t k = start; k <= n_max; ++k) {
            const auto& x = xs[static_cast<std::size_t>(k - 1)];
            const auto& a = as[static_cast<std::size_t>(k - 1)];
            const Rational one_minus = Rational(1) - a;
            row.lower *= x * one_minus * one_minus;
            row.middle *= x - a;
            row.upper *= x;
        }
        if (!(row.lower <= row.middle && row.middle <= row.upper)) report.sandwich_ok = false;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace c0dyn
