#include "doctest.h"
#include "generators.hpp"

#include "rhlab/enhanced.hpp"
#include "rhlab/hlt.hpp"

#include <cmath>

using namespace rhlab;

namespace {

PuiseuxSeries mono(Complex c, std::int64_t num, std::int64_t den = 1) { return PuiseuxSeries::monomial(c, Rational(num, den)); }

BorderedDomain arc(double lo, double hi) { return BorderedDomain{Chart::Sector, lo, hi, true, false, 1.0}; }

// One to three summands on a common arc with polar phis.
ExpSheaf randomSheaf(gen::Rng& r, const BorderedDomain& dom) {
    std::vector<ExpSummand> s;
    const int n = r.integer(1, 3);
    for (int i = 0; i < n; ++i) s.push_back(ExpSummand{dom, PhiFunction{gen::polarSeries(r, 2, 2, 1)}});
    return ExpSheaf(s);
}

}  // namespace

TEST_CASE("isomorphism at flagged and unflagged boundaries") {
    // Unbounded difference at the flagged origin.
    CHECK(!expIso(punctured(mono(1, -1)), punctured(mono(2, -1))));

    // No flagged endpoint: any difference is harmless.
    const BorderedDomain radial{Chart::Radial, 0.0, 2.0, false, false, 0.4};
    for (const PuiseuxSeries& a : {mono(1, 1), mono(1, 2), mono(Complex(0, 1), 3)})
        CHECK(expIso(ExpSheaf::single(radial, a), ExpSheaf::single(radial, PuiseuxSeries())));

    // Both ends of the line flagged: t is unbounded at infinity.
    const BorderedDomain line{Chart::Real, -INFINITY, INFINITY, true, true, 0.0};
    CHECK(!expIso(ExpSheaf::single(line, mono(1, 1)), ExpSheaf::single(line, PuiseuxSeries())));
}

TEST_CASE("exponent test agrees with sampling") {
    gen::Rng r(97);
    for (int trial = 0; trial < 200; ++trial) {
        const double lo = r.real(-3, 3), hi = lo + r.real(0.2, 2.0);
        const BorderedDomain dom = arc(lo, hi);
        const PuiseuxSeries g = gen::polarSeries(r, 2, 2, 1);
        // Sampling cannot see a boundary direction, so skip arcs ending near one.
        const double ends[] = {lo, hi};
        bool nearZero = false;
        if (!g.isZero()) {
            const auto [e, c] = *g.terms().begin();
            for (double th : ends) nearZero = nearZero || std::abs(std::cos(std::arg(c) + e.toDouble() * th)) < 0.05;
        }
        if (nearZero) continue;
        CHECK(differenceBoundedAbove(dom, g) == sampledBounded(dom, g, true));
        CHECK(differenceBounded(dom, g) == sampledBounded(dom, g, false));
    }
}

TEST_CASE("property: convolution, unit, Hom and isomorphism") {
    gen::Rng r(101);
    for (int trial = 0; trial < 200; ++trial) {
        const double lo = r.real(-3, 3);
        const BorderedDomain dom = arc(lo, lo + r.real(0.2, 2.0));
        const ExpSheaf a = randomSheaf(r, dom), b = randomSheaf(r, dom), c = randomSheaf(r, dom);
        CHECK(expIso(convolve(a, b), convolve(b, a)));
        CHECK(expIso(convolve(convolve(a, b), c), convolve(a, convolve(b, c))));
        const ExpSheaf unit = ExpSheaf::single(dom, PuiseuxSeries());
        CHECK(expIso(convolve(a, unit), a));

        // Equivalence relation.
        CHECK(expIso(a, a));
        CHECK(expIso(a, b) == expIso(b, a));
        if (expIso(a, b) && expIso(b, c)) CHECK(expIso(a, c));

        // Rank one: mutual one-dimensional Hom exactly when isomorphic.
        const ExpSheaf x = ExpSheaf::single(dom, a.summands()[0].phi.body);
        const ExpSheaf y = ExpSheaf::single(dom, r.coin() ? b.summands()[0].phi.body
                                                          : a.summands()[0].phi.body + PuiseuxSeries::constant(r.complex(3)));
        CHECK((homDim(x, y).total == 1 && homDim(y, x).total == 1) == expIso(x, y));
    }
}

TEST_CASE("Hom between rank-one Stokes local systems") {
    gen::Rng r(103);
    for (int trial = 0; trial < 10; ++trial) {
        const std::int64_t k = r.integer(1, 3);
        const ExponentialFactor f(mono(r.gaussianInt(3), -k));
        const ExponentialFactor g = r.coin() ? f : ExponentialFactor(mono(r.gaussianInt(3), -r.integer(1, 3)));
        const PuiseuxSeries diff = g.body() - f.body();
        const bool noPolar = diff.isZero();
        CHECK(slsHom(solT(rankOneOperator(f)), solT(rankOneOperator(g))) == (noPolar ? 1 : 0));
    }
}

TEST_CASE("Airy Stokes local system") {
    const StokesLocalSystem k = solT(atInfinity(parseOperator("D^2 - z")));
    CHECK(k.rank() == 2);
    CHECK(k.cover.size() == 6);
    CHECK(validateSLS(k).valid);
    CHECK(slsHom(k, k) == 1);
}
