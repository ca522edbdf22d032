#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "c0dyn/rational.hpp"

namespace c0dyn {

class search_cap_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline mpz_class binom(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

}  // namespace detail

// Exact nu(T^d A_n intersect A_n) for the majority set A_n on a window of
// width 2n+1. Splitting on the number of ones among the shared coordinates
// reduces the probability to binomial tails over the d private coordinates
// of each copy:
//
//   sum_s C(L,s) 2^-L * P(s + U > n) * P(s + V > n),   L = 2n+1 - min(d, 2n+1),
//
// with U, V independent Bin(min(d, 2n+1), 1/2). Only the band of s values
// within d of the majority cutoff contributes partial factors; the mass
// above the band is halved exactly by the s <-> L-s reflection, so the
// whole sum costs O(d) big-integer operations rather than O(n).
inline Rational overlap(std::int64_t n, std::int64_t d) {
    if (n < 1) throw std::invalid_argument("overlap: n must be >= 1");
    if (d < 0) throw std::invalid_argument("overlap: d must be >= 0");
    const std::int64_t width = 2 * n + 1;
    const std::int64_t dp = d < width ? d : width;
    const std::int64_t L = width - dp;

    // tails B(j) = sum_{i >= j} C(dp, i), for j = 0..dp+1
    std::vector<mpz_class> tail(static_cast<std::size_t>(dp) + 2);
    tail[static_cast<std::size_t>(dp) + 1] = 0;
    for (std::int64_t i = dp; i >= 0; --i)
        tail[static_cast<std::size_t>(i)] =
            tail[static_cast<std::size_t>(i) + 1] +
            detail::binom(static_cast<unsigned long>(dp), static_cast<unsigned long>(i));

    mpz_class four_pow_dp;
    mpz_ui_pow_ui(four_pow_dp.get_mpz_t(), 4, static_cast<unsigned long>(dp));

    const std::int64_t s_lo = std::max<std::int64_t>(0, n + 1 - dp);
    const std::int64_t s_hi = std::min<std::int64_t>(n, L);

    mpz_class band_count = 0;  // sum of C(L, s) over the band
    mpz_class partial = 0;     // band terms weighted by squared tails
    if (s_lo <= s_hi) {
        mpz_class c = detail::binom(static_cast<unsigned long>(L),
                                    static_cast<unsigned long>(s_lo));
        for (std::int64_t s = s_lo; s <= s_hi; ++s) {
            band_count += c;
            const auto& b = tail[static_cast<std::size_t>(n + 1 - s)];
            partial += c * b * b;
            if (s < s_hi) {
                c *= (L - s);
                mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(s + 1));
            }
        }
    }

    mpz_class num = partial;
    if (L >= n + 1) {
        // both tails saturate for s > n; reflection halves what is left
        mpz_class two_pow_L;
        mpz_ui_pow_ui(two_pow_L.get_mpz_t(), 2, static_cast<unsigned long>(L));
        mpz_class above = two_pow_L - band_count;
        mpz_divexact_ui(above.get_mpz_t(), above.get_mpz_t(), 2);
        num += above * four_pow_dp;
    }
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(L + 2 * dp));
    return Rational(num, den);
}

// nu(T^d A_n symdiff A_n) = 1 - 2 nu(T^d A_n intersect A_n).
inline Rational symdiff_shift(std::int64_t n, std::int64_t d) {
    return Rational(1) - Rational(2) * overlap(n, d);
}

// max_{0 <= d <= r} nu(T^d A_n symdiff A_n); by symmetry this covers the
// whole window {-r..r}.
inline Rational max_symdiff(std::int64_t n, std::int64_t r) {
    Rational best(0);
    for (std::int64_t d = 1; d <= r; ++d) {
        Rational v = symdiff_shift(n, d);
        if (v > best) best = v;
    }
    return best;
}

// Smallest n with max_{|d| <= window_radius} nu(dA_n symdiff A_n) <= slack.
// The symmetric difference is strictly decreasing in n once n >= d, so a
// galloping search past the linear prefix is sound and the result minimal.
inline std::int64_t ai_find(std::int64_t window_radius, const Rational& slack,
                            std::int64_t search_cap = std::int64_t{1} << 20) {
    if (window_radius < 0) throw std::invalid_argument("ai_find: negative window radius");
    if (slack.sign() <= 0 || slack > Rational(1, 2))
        throw std::invalid_argument("ai_find: slack must lie in (0, 1/2]");
    if (search_cap < 1) throw std::invalid_argument("ai_find: cap must be >= 1");
    auto ok = [&](std::int64_t n) { return max_symdiff(n, window_radius) <= slack; };

    const std::int64_t prefix = std::min<std::int64_t>(search_cap, 64);
    for (std::int64_t n = 1; n <= prefix; ++n)
        if (ok(n)) return n;
    std::int64_t lo = prefix;  // known failing, and >= window_radius
    std::int64_t hi = prefix;
    for (;;) {
        if (hi >= search_cap) {
            if (!ok(search_cap))
                throw search_cap_error("ai_find: no admissible n within the search cap");
            hi = search_cap;
            break;
        }
        hi = std::min(search_cap, hi * 2);
        if (ok(hi)) break;
        lo = hi;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace c0dyn
