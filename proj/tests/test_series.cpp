#include "doctest.h"
#include "generators.hpp"

#include "rhlab/series.hpp"

#include <cmath>
#include <numbers>

using namespace rhlab;

namespace {

PuiseuxSeries mono(Complex c, std::int64_t num, std::int64_t den = 1) { return PuiseuxSeries::monomial(c, Rational(num, den)); }

bool sameTerms(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    return a.terms() == b.terms() && a.truncationOrder() == b.truncationOrder();
}

}  // namespace

TEST_CASE("rational normal form and order") {
    Rational q(6, -4);
    CHECK(q.num() == -3);
    CHECK(q.den() == 2);
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
}

TEST_CASE("addition cancels exactly and aligns lattices") {
    CHECK((mono(1, 1, 2) + mono(-1, 1, 2)).isZero());
    CHECK((mono(2.0 / 3, 3, 2) + mono(-2.0 / 3, 3, 2)).isZero());
    CHECK((mono(1, 1, 2) + mono(-1, 1, 2)).ramification() == 1);
    CHECK((mono(1, 1, 2) + mono(1, 1, 3)).ramification() == 6);
}

TEST_CASE("multiplication") {
    CHECK(sameTerms(mono(1, 1, 2) * mono(1, 1, 2), mono(1, 1)));
    const PuiseuxSeries s = mono(Complex(2, -1), 3, 4) + mono(5, -2);
    CHECK(sameTerms(PuiseuxSeries::constant(1) * s, s));
}

TEST_CASE("product matches schoolbook convolution on random polynomials") {
    gen::Rng r(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Complex> a(5), b(5);
        for (auto& c : a) c = Complex(r.integer(-9, 9), r.integer(-9, 9));
        for (auto& c : b) c = Complex(r.integer(-9, 9), r.integer(-9, 9));
        std::vector<Complex> conv(9);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) conv[i + j] += a[i] * b[j];
        PuiseuxSeries sa, sb, expect;
        for (int i = 0; i < 5; ++i) {
            sa += mono(a[i], i);
            sb += mono(b[i], i);
        }
        for (int k = 0; k < 9; ++k) expect += mono(conv[k], k);
        CHECK(sameTerms(sa * sb, expect));
    }
}

TEST_CASE("truncation orders propagate") {
    const PuiseuxSeries a = mono(1, 0) + PuiseuxSeries::bigO(Rational(3));
    const PuiseuxSeries b = mono(1, 1, 2) + PuiseuxSeries::bigO(Rational(2));
    CHECK(*(a + b).truncationOrder() == Rational(2));
    CHECK(*(a * b).truncationOrder() == Rational(2));
    const PuiseuxSeries shifted = a * mono(1, 5);
    CHECK(*shifted.truncationOrder() == Rational(8));
    CHECK(shifted.coefficient(Rational(5)) == Complex(1));
}

TEST_CASE("valuation") {
    CHECK(*valuation(mono(1, 3, 2) + mono(1, 2)) == Rational(3, 2));
    CHECK(!valuation(PuiseuxSeries()).has_value());
    CHECK(*valuation(mono(-2.0 / 3, -3, 2)) == Rational(-3, 2));
}

TEST_CASE("evaluation") {
    CHECK(seriesEval(PuiseuxSeries::constant(5), Complex(0.3, 2), 4) == Complex(5));
    CHECK(std::abs(seriesEval(mono(1, 1, 2), 1.0, 1) - Complex(-1)) < 1e-15);
    const double R = 10.0;
    for (double th : {0.0, 0.7, 2.0, 4.5}) {
        const Complex v = PuiseuxSeries(mono(2.0 / 3, 3, 2)).evalLog(Complex(std::log(R), th));
        CHECK(v.real() == doctest::Approx(2.0 / 3 * std::pow(R, 1.5) * std::cos(1.5 * th)).epsilon(1e-13));
    }
}

TEST_CASE("ramify") {
    CHECK(sameTerms(ramify(mono(1, 3, 2), 2), mono(1, 3)));
    gen::Rng r(5);
    for (int trial = 0; trial < 50; ++trial) {
        const PuiseuxSeries s = gen::exactSeries(r, 5, -3, 3, 4);
        CHECK(sameTerms(ramify(s, 1), s));
        CHECK(sameTerms(ramify(ramify(s, 2), 3), ramify(s, 6)));
    }
}

TEST_CASE("property: ring laws hold exactly on exact series") {
    gen::Rng r(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const PuiseuxSeries a = gen::exactSeries(r, 4, -2, 2, 3);
        const PuiseuxSeries b = gen::exactSeries(r, 4, -2, 2, 3);
        const PuiseuxSeries c = gen::exactSeries(r, 4, -2, 2, 3);
        CHECK(sameTerms(a + b, b + a));
        CHECK(sameTerms(a * b, b * a));
        CHECK(sameTerms((a + b) + c, a + (b + c)));
        CHECK(sameTerms((a * b) * c, a * (b * c)));
        CHECK(sameTerms(a * (b + c), a * b + a * c));
    }
}

TEST_CASE("property: valuation is additive") {
    gen::Rng r(7);
    for (int trial = 0; trial < 200; ++trial) {
        const PuiseuxSeries a = gen::exactSeries(r, 4, -3, 3, 4);
        const PuiseuxSeries b = gen::exactSeries(r, 4, -3, 3, 4);
        if (a.isZero() || b.isZero()) continue;
        CHECK(*valuation(a * b) == *valuation(a) + *valuation(b));
    }
}

TEST_CASE("property: evaluation is a ring homomorphism") {
    gen::Rng r(99);
    for (int trial = 0; trial < 200; ++trial) {
        PuiseuxSeries::TermMap ma, mb;
        for (int i = 0; i < 4; ++i) {
            ma[r.rational(-2, 2, 4)] += r.complex(1e3);
            mb[r.rational(-2, 2, 4)] += r.complex(1e3);
        }
        const PuiseuxSeries a(ma), b(mb);
        const Complex z = std::polar(r.real(0.2, 3.0), r.real(-3.0, 3.0));
        const int branch = r.integer(-2, 2);
        const Complex ea = seriesEval(a, z, branch), eb = seriesEval(b, z, branch);
        // Relative to the size of the summands, since the sums may cancel.
        double sumScale = 0.0, prodScale = 0.0;
        for (const auto& [e, c] : a.terms())
            for (const auto& [f, d] : b.terms()) prodScale += std::abs(c * d) * std::pow(std::abs(z), (e + f).toDouble());
        for (const auto* s : {&a, &b})
            for (const auto& [e, c] : s->terms()) sumScale += std::abs(c) * std::pow(std::abs(z), e.toDouble());
        CHECK(std::abs(seriesEval(a + b, z, branch) - (ea + eb)) <= 1e-12 * sumScale);
        CHECK(std::abs(seriesEval(a * b, z, branch) - ea * eb) <= 1e-12 * prodScale);
    }
}

TEST_CASE("property: ramify is injective and multiplicative") {
    gen::Rng r(31);
    for (int trial = 0; trial < 200; ++trial) {
        const PuiseuxSeries a = gen::exactSeries(r, 4, -2, 2, 3);
        const PuiseuxSeries b = gen::exactSeries(r, 4, -2, 2, 3);
        const std::int64_t k = r.integer(1, 5);
        CHECK(sameTerms(ramify(a * b, k), ramify(a, k) * ramify(b, k)));
        CHECK(sameTerms(ramify(a, k), ramify(b, k)) == sameTerms(a, b));
        const PuiseuxSeries ra = ramify(a, k);
        for (const auto& [e, c] : ra.terms()) CHECK(ra.ramification() % e.den() == 0);
    }
}

TEST_CASE("exponential factors reject non-polar bodies") {
    CHECK_THROWS(ExponentialFactor(mono(1, 1)));
    CHECK_THROWS(ExponentialFactor(mono(1, -1) + PuiseuxSeries::bigO(Rational(2))));
    const ExponentialFactor f(mono(2.0 / 3, -3, 2));
    CHECK(f.poleOrder() == Rational(3, 2));
    CHECK(f.rotated().approxEqual(-f));
    CHECK(f.rotated(2).approxEqual(f));
}
