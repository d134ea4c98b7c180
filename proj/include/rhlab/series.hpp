#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace rhlab {

using Complex = std::complex<double>;

/// Exact rational number, always in lowest terms with a positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool isInteger() const { return den_ == 1; }
    bool isZero() const { return num_ == 0; }

    /// Largest integer not exceeding the value.
    std::int64_t floor() const;

    Rational operator-() const { return Rational(-num_, den_); }
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::string toString() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Exponent that may be +infinity (valuation of zero, truncation of an exact series).
using ExtRational = std::optional<Rational>;

ExtRational extAdd(const ExtRational& a, const ExtRational& b);
ExtRational extMin(const ExtRational& a, const ExtRational& b);
/// a < b with nullopt treated as +infinity.
bool extLess(const ExtRational& a, const ExtRational& b);

std::int64_t lcm64(std::int64_t a, std::int64_t b);

/// Truncated Puiseux series sum_e c_e z^e with exact rational exponents.
///
/// Exponents at or above truncationOrder() are unknown rather than zero;
/// an absent truncation means the series is exact. Sums and products drop a
/// coefficient whose modulus falls below 1e-12 times the largest contribution
/// to that exponent (floor 1).
class PuiseuxSeries {
public:
    using TermMap = std::map<Rational, Complex>;

    static constexpr double kDropTolerance = 1e-12;

    PuiseuxSeries() = default;
    explicit PuiseuxSeries(TermMap terms, ExtRational truncation = std::nullopt);

    static PuiseuxSeries constant(Complex c);
    static PuiseuxSeries monomial(Complex c, Rational exponent);
    /// Zero with a known truncation order: nothing is known from `order` on.
    static PuiseuxSeries bigO(Rational order);

    const TermMap& terms() const { return terms_; }
    const ExtRational& truncationOrder() const { return truncation_; }
    std::int64_t ramification() const { return ramification_; }
    bool isZero() const { return terms_.empty(); }
    bool isExact() const { return !truncation_.has_value(); }

    Complex coefficient(const Rational& e) const;
    ExtRational valuation() const;
    /// Coefficient at the valuation; zero for the zero series.
    Complex leadingCoefficient() const;
    double maxAbsCoefficient() const;

    PuiseuxSeries operator-() const;
    friend PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b);
    friend PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b);
    friend PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b);
    PuiseuxSeries& operator+=(const PuiseuxSeries& b) { return *this = *this + b; }
    PuiseuxSeries scaled(Complex c) const;
    /// Multiplication by z^e.
    PuiseuxSeries shifted(const Rational& e) const;
    /// z d/dz applied term-wise.
    PuiseuxSeries delta() const;
    /// Substitution z -> z^q for a nonzero rational q; q < 0 requires an exact series.
    PuiseuxSeries substitutePower(const Rational& q) const;
    /// Drops every term with exponent >= order and lowers the truncation accordingly.
    PuiseuxSeries truncatedAt(const Rational& order) const;
    /// Keeps only the terms with exponent strictly below zero (the polar part).
    PuiseuxSeries polarPart() const;

    /// Sum of the known terms at exp(logPoint); logPoint fixes the determination.
    Complex evalLog(Complex logPoint) const;

    /// Term maps agree within an absolute tolerance and truncations coincide.
    bool approxEqual(const PuiseuxSeries& other, double tol = 1e-12) const;

    std::string toString(const std::string& var = "z") const;

private:
    void normalize();

    TermMap terms_;
    ExtRational truncation_;
    std::int64_t ramification_ = 1;
};

PuiseuxSeries seriesAdd(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries seriesMul(const PuiseuxSeries& a, const PuiseuxSeries& b);
ExtRational valuation(const PuiseuxSeries& a);
/// Evaluates at `point` using log(point) = principal value + 2 pi i branch.
Complex seriesEval(const PuiseuxSeries& a, Complex point, int branch);
/// Substitution z = w^k.
PuiseuxSeries ramify(const PuiseuxSeries& a, std::int64_t k);

/// Polynomial in z^{-1/d} without constant term: the exponent of an exponential factor.
class ExponentialFactor {
public:
    ExponentialFactor() = default;
    /// Throws DomainError unless every exponent is negative and the series is exact.
    explicit ExponentialFactor(PuiseuxSeries body);

    const PuiseuxSeries& body() const { return body_; }
    bool isZero() const { return body_.isZero(); }
    std::int64_t ramification() const { return body_.ramification(); }
    /// -valuation, i.e. the pole order; zero for the zero factor.
    Rational poleOrder() const;

    /// Image under the deck transformation z^{1/d} -> e^{2 pi i / d} z^{1/d}, applied `turns` times.
    ExponentialFactor rotated(int turns = 1) const;

    ExponentialFactor operator-() const { return ExponentialFactor(-body_); }
    friend ExponentialFactor operator+(const ExponentialFactor& a, const ExponentialFactor& b) {
        return ExponentialFactor(a.body_ + b.body_);
    }
    friend ExponentialFactor operator-(const ExponentialFactor& a, const ExponentialFactor& b) {
        return ExponentialFactor(a.body_ - b.body_);
    }

    bool approxEqual(const ExponentialFactor& other, double tol = 1e-9) const {
        return body_.approxEqual(other.body_, tol);
    }

private:
    PuiseuxSeries body_;
};

}  // namespace rhlab
