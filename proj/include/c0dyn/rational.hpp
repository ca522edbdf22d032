#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <gmpxx.h>

namespace c0dyn {

// Arbitrary-precision rational, always stored in canonical form
// (coprime numerator/denominator, denominator > 0).
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}           // NOLINT: implicit by design
    Rational(int n) : v_(n) {}            // NOLINT
    Rational(long num, long den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    Rational(const mpz_class& num, const mpz_class& den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    explicit Rational(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }

    // Accepts "p/q" or a bare integer "p". Throws on malformed input.
    static Rational parse(std::string_view s);

    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational pow(unsigned long e) const {
        mpz_class num, den;
        mpz_pow_ui(num.get_mpz_t(), v_.get_num().get_mpz_t(), e);
        mpz_pow_ui(den.get_mpz_t(), v_.get_den().get_mpz_t(), e);
        return Rational(num, den);
    }

    // 2^e for any integer e.
    static Rational pow2(long e) {
        mpz_class p(1);
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
        return e < 0 ? Rational(mpz_class(1), p) : Rational(p, mpz_class(1));
    }

    // Canonical "p/q" form, the denominator always spelled out ("3/1", "0/1").
    std::string str() const {
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    double to_double() const { return v_.get_d(); }

private:
    mpq_class v_;
};

inline Rational Rational::parse(std::string_view s) {
    auto bad = [&] { return std::invalid_argument("Rational::parse: bad literal '" + std::string(s) + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto check_int = [&](std::string_view t) {
        if (t.empty()) throw bad();
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) throw bad();
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') throw bad();
    };
    if (slash == std::string_view::npos) {
        check_int(s);
        return Rational(mpz_class(std::string(s)), mpz_class(1));
    }
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    check_int(num);
    check_int(den);
    mpz_class d{std::string(den)};
    if (d == 0) throw std::invalid_argument("Rational::parse: zero denominator");
    return Rational(mpz_class(std::string(num)), d);
}

// Closed interval [lo, hi] with exact rational endpoints.
struct Enclosure {
    Rational lo;
    Rational hi;

    Enclosure(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw std::invalid_argument("Enclosure: lo > hi");
    }

    Rational width() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }

    friend bool operator==(const Enclosure& a, const Enclosure& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

// A measure-like quantity: either known exactly or pinned to an interval.
// Values are required to be nonnegative at the lower end.
class MeasureValue {
public:
    static MeasureValue exact(Rational v) {
        if (v.sign() < 0) throw std::invalid_argument("MeasureValue: negative value");
        return MeasureValue(std::move(v));
    }
    static MeasureValue interval(Rational lo, Rational hi) {
        if (lo.sign() < 0) throw std::invalid_argument("MeasureValue: negative lower bound");
        return MeasureValue(Enclosure(std::move(lo), std::move(hi)));
    }
    static MeasureValue interval(Enclosure e) {
        if (e.lo.sign() < 0) throw std::invalid_argument("MeasureValue: negative lower bound");
        return MeasureValue(std::move(e));
    }

    bool is_exact() const { return std::holds_alternative<Rational>(v_); }
    const Rational& value() const {
        if (!is_exact()) throw std::logic_error("MeasureValue: not exact");
        return std::get<Rational>(v_);
    }
    Rational lower() const {
        return is_exact() ? std::get<Rational>(v_) : std::get<Enclosure>(v_).lo;
    }
    Rational upper() const {
        return is_exact() ? std::get<Rational>(v_) : std::get<Enclosure>(v_).hi;
    }

    friend bool operator==(const MeasureValue& a, const MeasureValue& b) {
        return a.lower() == b.lower() && a.upper() == b.upper();
    }

private:
    explicit MeasureValue(Rational v) : v_(std::move(v)) {}
    explicit MeasureValue(Enclosure e) : v_(std::move(e)) {}
    std::variant<Rational, Enclosure> v_;
};

// Rational enclosure of e^{-x} for 0 < x <= 1, by alternating Taylor
// partial sums: S_{2j+1} <= e^{-x} <= S_{2j}. Deepens until the gap
// S_{2j} - S_{2j+1} = x^{2j+1}/(2j+1)! is at most width_bound.
// The lower endpoint always satisfies lo >= 1 - x.
inline Enclosure exp_neg_enclosure(const Rational& x, const Rational& width_bound) {
    if (x.sign() <= 0 || x > Rational(1))
        throw std::invalid_argument("exp_neg_enclosure: x must lie in (0, 1]");
    if (width_bound.sign() <= 0)
        throw std::invalid_argument("exp_neg_enclosure: width bound must be positive");

    Rational even_sum(1);   // S_0
    Rational term(1);       // x^i / i!, currently i = 0
    unsigned long i = 0;
    for (;;) {
        term = term * x / Rational(static_cast<long>(i + 1));
        ++i;                                   // odd i
        Rational odd_sum = even_sum - term;
        if (term <= width_bound) return Enclosure(odd_sum, even_sum);
        term = term * x / Rational(static_cast<long>(i + 1));
        ++i;                                   // even i
        even_sum = odd_sum + term;
    }
}

// Product of measure values; exact iff every input is exact. All inputs
// are nonnegative by the MeasureValue invariant, so endpoint-wise products
// bound the true product.
inline MeasureValue interval_product(std::span<const MeasureValue> values) {
    bool all_exact = true;
    Rational lo(1), hi(1);
    for (const auto& v : values) {
        all_exact = all_exact && v.is_exact();
        lo *= v.lower();
        hi *= v.upper();
    }
    if (all_exact) return MeasureValue::exact(lo);
    return MeasureValue::interval(lo, hi);
}

}  // namespace c0dyn
