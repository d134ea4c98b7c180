#include "rhlab/series.hpp"

#include "rhlab/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace rhlab {

// ---------------------------------------------------------------------------
// Rational

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g ? num / g : 0;
    den_ = g ? den / g : 1;
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    return Rational(a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num_ < 0 ? -a.num_ : a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_ < 0 ? -b.num_ : b.num_, a.den_);
    const std::int64_t n1 = g1 ? a.num_ / g1 : 0, d2 = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t n2 = g2 ? b.num_ / g2 : 0, d1 = g2 ? a.den_ / g2 : a.den_;
    return Rational(n1 * n2, d1 * d2);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    // Cross multiplication in 128 bits cannot overflow for 64-bit operands.
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::toString() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

ExtRational extAdd(const ExtRational& a, const ExtRational& b) {
    if (!a || !b) return std::nullopt;
    return *a + *b;
}

ExtRational extMin(const ExtRational& a, const ExtRational& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

bool extLess(const ExtRational& a, const ExtRational& b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

// ---------------------------------------------------------------------------
// PuiseuxSeries

PuiseuxSeries::PuiseuxSeries(TermMap terms, ExtRational truncation)
    : terms_(std::move(terms)), truncation_(std::move(truncation)) {
    normalize();
}

PuiseuxSeries PuiseuxSeries::constant(Complex c) { return monomial(c, Rational(0)); }

PuiseuxSeries PuiseuxSeries::monomial(Complex c, Rational exponent) {
    TermMap t;
    t.emplace(exponent, c);
    return PuiseuxSeries(std::move(t));
}

PuiseuxSeries PuiseuxSeries::bigO(Rational order) { return PuiseuxSeries(TermMap{}, order); }

void PuiseuxSeries::normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        const bool beyond = truncation_ && !(it->first < *truncation_);
        if (beyond || it->second == Complex(0.0))
            it = terms_.erase(it);
        else
            ++it;
    }
    ramification_ = 1;
    for (const auto& [e, c] : terms_) ramification_ = std::lcm(ramification_, e.den());
}

Complex PuiseuxSeries::coefficient(const Rational& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Complex(0.0) : it->second;
}

ExtRational PuiseuxSeries::valuation() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.begin()->first;
}

Complex PuiseuxSeries::leadingCoefficient() const {
    return terms_.empty() ? Complex(0.0) : terms_.begin()->second;
}

double PuiseuxSeries::maxAbsCoefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

PuiseuxSeries PuiseuxSeries::operator-() const { return scaled(-1.0); }

PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    // Cancellation is judged per exponent against the contributing coefficients.
    PuiseuxSeries::TermMap t = a.terms_;
    std::map<Rational, double> scale;
    for (const auto& [e, c] : a.terms_) scale[e] = std::abs(c);
    for (const auto& [e, c] : b.terms_) {
        t[e] += c;
        scale[e] = std::max(scale[e], std::abs(c));
    }
    for (auto it = t.begin(); it != t.end();) {
        if (std::abs(it->second) < PuiseuxSeries::kDropTolerance * std::max(1.0, scale[it->first]))
            it = t.erase(it);
        else
            ++it;
    }
    return PuiseuxSeries(std::move(t), extMin(a.truncation_, b.truncation_));
}

PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) { return a + (-b); }

PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    const ExtRational trunc =
        extMin(extAdd(a.valuation(), b.truncation_), extAdd(b.valuation(), a.truncation_));
    // A zero factor with unknown tail still only knows the product up to its own order.
    ExtRational t = trunc;
    if (a.isZero() && a.truncation_) t = extMin(t, extAdd(a.truncation_, b.valuation()));
    if (b.isZero() && b.truncation_) t = extMin(t, extAdd(b.truncation_, a.valuation()));
    if ((a.isZero() && !a.truncation_) || (b.isZero() && !b.truncation_)) return PuiseuxSeries();
    PuiseuxSeries::TermMap out;
    std::map<Rational, double> scale;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            const Rational e = ea + eb;
            if (t && !(e < *t)) continue;
            out[e] += ca * cb;
            scale[e] = std::max(scale[e], std::abs(ca * cb));
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (std::abs(it->second) < PuiseuxSeries::kDropTolerance * std::max(1.0, scale[it->first]))
            it = out.erase(it);
        else
            ++it;
    }
    return PuiseuxSeries(std::move(out), t);
}

PuiseuxSeries PuiseuxSeries::scaled(Complex c) const {
    if (c == Complex(0.0)) return PuiseuxSeries(TermMap{}, truncation_);
    TermMap t;
    for (const auto& [e, v] : terms_) t.emplace(e, v * c);
    return PuiseuxSeries(std::move(t), truncation_);
}

PuiseuxSeries PuiseuxSeries::shifted(const Rational& s) const {
    TermMap t;
    for (const auto& [e, v] : terms_) t.emplace(e + s, v);
    ExtRational tr = truncation_ ? ExtRational(*truncation_ + s) : std::nullopt;
    return PuiseuxSeries(std::move(t), tr);
}

PuiseuxSeries PuiseuxSeries::delta() const {
    TermMap t;
    for (const auto& [e, v] : terms_)
        if (!e.isZero()) t.emplace(e, v * e.toDouble());
    return PuiseuxSeries(std::move(t), truncation_);
}

PuiseuxSeries PuiseuxSeries::substitutePower(const Rational& q) const {
    if (q.isZero()) throw DomainError("substitution z -> z^0 is not invertible");
    if (q < Rational(0) && truncation_)
        throw DomainError("cannot invert the variable of a truncated series");
    TermMap t;
    for (const auto& [e, v] : terms_) t.emplace(e * q, v);
    ExtRational tr = truncation_ ? ExtRational(*truncation_ * q) : std::nullopt;
    return PuiseuxSeries(std::move(t), tr);
}

PuiseuxSeries PuiseuxSeries::truncatedAt(const Rational& order) const {
    return PuiseuxSeries(terms_, extMin(truncation_, order));
}

PuiseuxSeries PuiseuxSeries::polarPart() const {
    TermMap t;
    for (const auto& [e, v] : terms_)
        if (e < Rational(0)) t.emplace(e, v);
    return PuiseuxSeries(std::move(t));
}

Complex PuiseuxSeries::evalLog(Complex logPoint) const {
    Complex sum = 0.0;
    for (const auto& [e, c] : terms_) sum += c * std::exp(e.toDouble() * logPoint);
    return sum;
}

bool PuiseuxSeries::approxEqual(const PuiseuxSeries& other, double tol) const {
    if (truncation_ != other.truncation_) return false;
    TermMap diff = terms_;
    for (const auto& [e, c] : other.terms_) diff[e] -= c;
    for (const auto& [e, c] : diff)
        if (std::abs(c) > tol) return false;
    return true;
}

namespace {

std::string formatComplex(Complex c) {
    std::ostringstream os;
    os.precision(17);
    if (c.imag() == 0.0) {
        os << c.real();
    } else {
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    }
    return os.str();
}

}  // namespace

std::string PuiseuxSeries::toString(const std::string& var) const {
    std::string out;
    for (const auto& [e, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += formatComplex(c);
        if (!e.isZero()) {
            out += "*" + var;
            if (!(e == Rational(1)))
                out += "^" + (e.isInteger() && e.num() > 0 ? e.toString() : "(" + e.toString() + ")");
        }
    }
    if (truncation_) {
        if (!out.empty()) out += " + ";
        out += "O(" + var + "^" + truncation_->toString() + ")";
    }
    return out.empty() ? "0" : out;
}

PuiseuxSeries seriesAdd(const PuiseuxSeries& a, const PuiseuxSeries& b) { return a + b; }
PuiseuxSeries seriesMul(const PuiseuxSeries& a, const PuiseuxSeries& b) { return a * b; }
ExtRational valuation(const PuiseuxSeries& a) { return a.valuation(); }

Complex seriesEval(const PuiseuxSeries& a, Complex point, int branch) {
    if (point == Complex(0.0)) throw DomainError("series evaluated at z = 0");
    const Complex logPoint = std::log(point) + Complex(0.0, 2.0 * std::numbers::pi * branch);
    return a.evalLog(logPoint);
}

PuiseuxSeries ramify(const PuiseuxSeries& a, std::int64_t k) {
    if (k < 1) throw DomainError("ramification index must be positive");
    return a.substitutePower(Rational(k));
}

// ---------------------------------------------------------------------------
// ExponentialFactor

ExponentialFactor::ExponentialFactor(PuiseuxSeries body) : body_(std::move(body)) {
    if (!body_.isExact()) throw DomainError("exponential factor must be an exact polynomial");
    for (const auto& [e, c] : body_.terms())
        if (!(e < Rational(0)))
            throw DomainError("exponential factor has non-negative exponent " + e.toString());
}

Rational ExponentialFactor::poleOrder() const {
    auto v = body_.valuation();
    return v ? -*v : Rational(0);
}

ExponentialFactor ExponentialFactor::rotated(int turns) const {
    PuiseuxSeries::TermMap t;
    for (const auto& [e, c] : body_.terms())
        t.emplace(e, c * std::exp(Complex(0.0, 2.0 * std::numbers::pi * e.toDouble() * turns)));
    return ExponentialFactor(PuiseuxSeries(std::move(t)));
}

}  // namespace rhlab
