#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace tsirelson {

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Thin value wrapper over GMP's mpq_class.
class Rational {
public:
    Rational() = default;
    Rational(long v) : q_(v) {}                   // NOLINT(implicit)
    Rational(int v) : q_(static_cast<long>(v)) {} // NOLINT(implicit)
    Rational(long num, unsigned long den);
    explicit Rational(const mpz_class& v) : q_(v) {}
    explicit Rational(mpq_class v);
    Rational(const mpz_class& num, const mpz_class& den);

    /// Accepts "p", "p/q", "-p/q" with optional surrounding whitespace.
    /// Throws std::invalid_argument on malformed input or zero denominator.
    static Rational parse(std::string_view text);

    const mpq_class& raw() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    int sign() const { return sgn(q_); }
    bool is_integer() const { return q_.get_den() == 1; }

    /// Canonical "p/q" form; integers print without a denominator.
    std::string str() const { return q_.get_str(); }
    double to_double() const { return q_.get_d(); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const { return Rational(mpq_class(-q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    mpq_class q_;
};

Rational abs(const Rational& r);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);
std::ostream& operator<<(std::ostream& os, const Rational& r);

} // namespace tsirelson
