#include "doctest.h"
#include "generators.hpp"

#include "rhlab/diffop.hpp"
#include "rhlab/error.hpp"

#include <cmath>

using namespace rhlab;

namespace {

PuiseuxSeries mono(Complex c, std::int64_t num, std::int64_t den = 1) { return PuiseuxSeries::monomial(c, Rational(num, den)); }

// Applies sum_j a_j D^j to z^e with falling factorials, independent of the delta form.
PuiseuxSeries applyToMonomial(const DiffOp& p, const Rational& e) {
    PuiseuxSeries out;
    for (int j = 0; j <= p.order(); ++j) {
        Complex ff = 1.0;
        for (int i = 0; i < j; ++i) ff *= (e - Rational(i)).toDouble();
        out += p.coeff(j) * mono(ff, (e - Rational(j)).num(), (e - Rational(j)).den());
    }
    return out;
}

DiffOp randomOperator(gen::Rng& r, int maxDen) {
    const int m = r.integer(1, 3);
    std::vector<PuiseuxSeries> c;
    for (int j = 0; j <= m; ++j) c.push_back(r.integer(0, 3) == 0 && j < m ? PuiseuxSeries() : gen::exactSeries(r, 3, 0, 3, maxDen));
    return DiffOp(c);
}

}  // namespace

TEST_CASE("parse examples") {
    const DiffOp p = parseOperator("z^2*D + 1");
    CHECK(p.order() == 1);
    CHECK(p.coeff(1).approxEqual(mono(1, 2)));
    CHECK(p.coeff(0).approxEqual(PuiseuxSeries::constant(1)));

    const DiffOp airy = parseOperator("D^2 - z");
    CHECK(airy.order() == 2);
    CHECK(airy.coeff(0).approxEqual(mono(-1, 1)));
    CHECK(airy.coeff(1).isZero());

    const DiffOp toy = parseOperator("z*D - (1/2)");
    CHECK(toy.coeff(0).approxEqual(PuiseuxSeries::constant(-0.5)));

    // Products compose.
    CHECK(parseOperator("D*z").approxEqual(parseOperator("z*D + 1")));
    CHECK(parseOperator("delta").approxEqual(parseOperator("z*D")));
    CHECK(parseOperator("z^(1/2)*D - (2+3i)").coeff(0).approxEqual(PuiseuxSeries::constant(Complex(-2, -3))));
}

TEST_CASE("parse errors carry positions") {
    try {
        parseOperator("D^2 + * z");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 7);
    }
    CHECK_THROWS_AS(parseOperator("D/z"), ParseError);
    CHECK_THROWS_AS(parseOperator("(D"), ParseError);
    CHECK_THROWS_AS(parseOperator("3"), ParseError);
}

TEST_CASE("delta form of the Airy operator") {
    const DeltaForm d = toDeltaForm(parseOperator("D^2 - z"));
    REQUIRE(d.order() == 2);
    CHECK(d.coeff(2).approxEqual(mono(1, -2)));
    CHECK(d.coeff(1).approxEqual(mono(-1, -2)));
    CHECK(d.coeff(0).approxEqual(mono(-1, 1)));
    const DiffOp p = parseOperator("D^2 - z");
    for (const Rational e : {Rational(1), Rational(3, 2), Rational(2)})
        CHECK(d.apply(mono(1, e.num(), e.den())).approxEqual(applyToMonomial(p, e)));
}

TEST_CASE("Airy operator on its truncated Taylor solution") {
    // a_{k+2} = a_{k-1} / ((k+2)(k+1)) with a_0 = 1, a_1 = 0.
    std::vector<double> a(11, 0.0);
    a[0] = 1.0;
    for (int k = 1; k + 2 <= 10; ++k) a[k + 2] = a[k - 1] / ((k + 2) * (k + 1));
    PuiseuxSeries u;
    for (int k = 0; k <= 10; ++k) u += mono(a[k], k);
    const PuiseuxSeries res = applyToSeries(parseOperator("D^2 - z"), u);
    CHECK(*valuation(res) >= Rational(9));
}

TEST_CASE("gauge by 1/z solves z^2 D + 1") {
    const DiffOp q = gaugeExp(parseOperator("z^2*D + 1"), mono(1, -1), 0.0);
    CHECK(q.approxEqual(parseOperator("z^2*D")));
}

TEST_CASE("Airy at infinity") {
    const DiffOp q = atInfinity(parseOperator("D^2 - z"));
    CHECK(q.basePoint() == BasePoint::Infinity);
    const DiffOp expect = parseOperator("z^4*D^2 + 2*z^3*D - z^(-1)");
    CHECK(DiffOp(q.coeffs()).approxEqual(expect));
}

TEST_CASE("property: parse and print round trip") {
    gen::Rng r(17);
    for (int trial = 0; trial < 200; ++trial) {
        const DiffOp p = randomOperator(r, 3);
        const DiffOp q = parseOperator(p.toString());
        CHECK(q.approxEqual(p, 0.0));
    }
}

TEST_CASE("property: delta form agrees with direct application") {
    gen::Rng r(23);
    for (int trial = 0; trial < 200; ++trial) {
        const DiffOp p = randomOperator(r, 2);
        const Rational e = r.rational(-3, 3, 3);
        const PuiseuxSeries direct = applyToMonomial(p, e);
        CHECK(toDeltaForm(p).apply(mono(1, e.num(), e.den())).approxEqual(direct, 1e-9));
        CHECK(applyToSeries(p, mono(1, e.num(), e.den())).approxEqual(direct, 1e-9));
        CHECK(toDeltaForm(fromDeltaForm(toDeltaForm(p))).approxEqual(toDeltaForm(p), 1e-12));
    }
}

TEST_CASE("property: gauge transformation is a group action") {
    gen::Rng r(41);
    for (int trial = 0; trial < 200; ++trial) {
        const DiffOp p = randomOperator(r, 2);
        const PuiseuxSeries f = gen::polarSeries(r, 2, 2, 2), g = gen::polarSeries(r, 2, 2, 2);
        const Complex rho(r.integer(-2, 2), r.integer(-2, 2)), sigma(r.integer(-2, 2), 0);
        const DiffOp lhs = gaugeExp(gaugeExp(p, f, rho), g, sigma);
        const DiffOp rhs = gaugeExp(p, f + g, rho + sigma);
        CHECK(lhs.approxEqual(rhs, 1e-8));
    }
}

TEST_CASE("property: atInfinity is an involution") {
    gen::Rng r(43);
    for (int trial = 0; trial < 200; ++trial) {
        const DiffOp p = randomOperator(r, 3);
        const DiffOp back = atInfinity(atInfinity(p));
        CHECK(back.approxEqual(p, 1e-9));
    }
}

TEST_CASE("property: fuchsianTest is invariant under monomial left factors") {
    gen::Rng r(47);
    for (int trial = 0; trial < 200; ++trial) {
        const DiffOp p = randomOperator(r, 2);
        const PuiseuxSeries m = mono(r.gaussianInt(4), r.integer(-3, 3), r.integer(1, 3));
        std::vector<PuiseuxSeries> c;
        for (const auto& a : p.coeffs()) c.push_back(m * a);
        CHECK(fuchsianTest(DiffOp(c)) == fuchsianTest(p));
    }
    CHECK(fuchsianTest(parseOperator("z*D - (1/2)")));
    CHECK(!fuchsianTest(parseOperator("z^2*D + 1")));
    CHECK(!fuchsianTest(atInfinity(parseOperator("D^2 - z"))));
}
