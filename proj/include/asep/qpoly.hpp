#pragma once

#include <gmpxx.h>

#include <climits>
#include <string>
#include <utility>
#include <vector>

#include "asep/ring.hpp"

namespace asep {

/// Polynomial in q with exact rational coefficients, lowest power first.
class QPoly {
public:
    /// degree() of the zero polynomial.
    static constexpr int kMinusInfinity = INT_MIN;

    QPoly() = default;
    QPoly(long c);  // NOLINT: constants convert implicitly
    QPoly(const mpq_class& c);  // NOLINT
    explicit QPoly(std::vector<mpq_class> coeffs);

    static QPoly q_power(unsigned n);  // q^n
    static QPoly one_minus_q_power(unsigned n);  // 1 - q^n

    int degree() const;
    bool is_zero() const { return c_.empty(); }
    const std::vector<mpq_class>& coeffs() const { return c_; }
    mpq_class coeff(std::size_t i) const { return i < c_.size() ? c_[i] : mpq_class(0); }
    mpq_class leading() const { return c_.empty() ? mpq_class(0) : c_.back(); }

    QPoly& operator+=(const QPoly& o);
    QPoly& operator-=(const QPoly& o);
    QPoly& operator*=(const QPoly& o);
    QPoly& operator*=(const mpq_class& s);
    QPoly operator-() const;

    friend QPoly operator+(QPoly a, const QPoly& b) { return a += b; }
    friend QPoly operator-(QPoly a, const QPoly& b) { return a -= b; }
    friend QPoly operator*(QPoly a, const QPoly& b) { return a *= b; }
    friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

    mpq_class evaluate_at(const mpq_class& q) const;
    double evaluate_at(double q) const;

    bool has_integer_coeffs() const;
    bool has_nonnegative_coeffs() const;

    /// gcd of numerators / lcm of denominators, positive; 0 for the zero polynomial.
    mpq_class content() const;
    /// this / content(): integer coefficients with gcd 1 (sign kept).
    QPoly primitive_part() const;

private:
    void trim();
    std::vector<mpq_class> c_;
};

/// Quotient and remainder over Q[q].
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
/// Throws std::domain_error when b does not divide a.
QPoly exact_divide(const QPoly& a, const QPoly& b);
/// Monic gcd over Q[q] via a primitive remainder sequence. gcd(0,0) throws.
QPoly gcd(const QPoly& a, const QPoly& b);

QPoly qint(long n);
QPoly qfact(long n);
mpz_class binomial(unsigned long n, unsigned long k);

/// Literal product formula: prod_n C(L, K_n) * prod_{n>=2} [K_n]!/[k_n]!
/// with K_n = k_1 + ... + k_n.
QPoly denominator_formula(const ParticleCounts& counts);
/// denominator_formula after reduce_full_ring (a type filling the ring is
/// the same as holes).
QPoly common_denominator(const ParticleCounts& counts);

/// Rational function num/den in lowest terms; den is primitive over Z with
/// positive leading coefficient.
class QRational {
public:
    QRational() : num_(0), den_(1) {}
    QRational(long c) : num_(c), den_(1) {}  // NOLINT
    QRational(const mpq_class& c) : num_(c), den_(1) {}  // NOLINT
    QRational(const QPoly& p) : num_(p), den_(1) {}  // NOLINT
    QRational(const QPoly& num, const QPoly& den);

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    QRational& operator+=(const QRational& o);
    QRational& operator-=(const QRational& o);
    QRational& operator*=(const QRational& o);
    QRational& operator/=(const QRational& o);
    QRational operator-() const { return QRational(-num_, den_, true); }

    friend QRational operator+(QRational a, const QRational& b) { return a += b; }
    friend QRational operator-(QRational a, const QRational& b) { return a -= b; }
    friend QRational operator*(QRational a, const QRational& b) { return a *= b; }
    friend QRational operator/(QRational a, const QRational& b) { return a /= b; }
    friend bool operator==(const QRational& a, const QRational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    /// Throws std::domain_error if the denominator vanishes at q.
    mpq_class evaluate_at(const mpq_class& q) const;
    double evaluate_at(double q) const;

private:
    QRational(QPoly num, QPoly den, bool /*already reduced*/)
        : num_(std::move(num)), den_(std::move(den)) {}
    void normalize();
    QPoly num_, den_;
};

std::string coeff_to_string(const mpq_class& c);
/// "[1, 2, 2, 1]"
std::string to_string(const QPoly& p);
/// "[num] / [den]"
std::string to_string(const QRational& r);
QPoly parse_qpoly(const std::string& text);

/// Human-readable "1 + 2q + q^2" form for reports.
std::string pretty(const QPoly& p);

/// Parse "p/r", an integer, or a decimal such as "0.25" into an exact rational.
mpq_class parse_rational(const std::string& text);

}  // namespace asep
