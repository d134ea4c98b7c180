#include "doctest.h"
#include "generators.hpp"

#include "rhlab/diffop.hpp"
#include "rhlab/hlt.hpp"

#include <cmath>
#include <numbers>

using namespace rhlab;

namespace {

PuiseuxSeries mono(Complex c, std::int64_t num, std::int64_t den = 1) { return PuiseuxSeries::monomial(c, Rational(num, den)); }

DiffOp airyAtInfinity() { return atInfinity(parseOperator("D^2 - z")); }

// Lower boundary of the union of quadrants {x <= k, y >= o_k} at integer x, by enumeration.
std::vector<std::pair<Rational, int>> bruteSlopes(const std::vector<std::pair<int, Rational>>& pts, int m) {
    std::vector<Rational> h(static_cast<std::size_t>(m + 1));
    for (int x = 0; x <= m; ++x) {
        std::optional<Rational> best;
        auto take = [&](const Rational& v) {
            if (!best || v < *best) best = v;
        };
        for (const auto& [k, o] : pts)
            if (k >= x) take(o);
        for (const auto& [ka, oa] : pts)
            for (const auto& [kb, ob] : pts)
                if (ka < x && x < kb) take(oa + (ob - oa) * Rational(x - ka, kb - ka));
        h[static_cast<std::size_t>(x)] = *best;
    }
    std::vector<std::pair<Rational, int>> out;
    for (int x = 0; x < m; ++x) {
        const Rational s = h[static_cast<std::size_t>(x + 1)] - h[static_cast<std::size_t>(x)];
        if (!out.empty() && out.back().first == s) ++out.back().second;
        else out.emplace_back(s, 1);
    }
    return out;
}

DiffOp randomOperator(gen::Rng& r) {
    const int m = r.integer(1, 3);
    std::vector<PuiseuxSeries> c;
    for (int j = 0; j <= m; ++j) {
        PuiseuxSeries::TermMap t;
        const int n = r.integer(j == m ? 1 : 0, 2);
        for (int i = 0; i < n; ++i) t[Rational(r.integer(0, 5))] = Complex(r.integer(1, 4) * (r.coin() ? 1 : -1), 0);
        c.emplace_back(t);
    }
    return DiffOp(c);
}

// Matches two factor lists up to order, with multiplicities.
bool sameFactorSet(std::vector<FactorMultiplicity> a, std::vector<FactorMultiplicity> b, double tol) {
    if (a.size() != b.size()) return false;
    for (const auto& fa : a) {
        auto it = std::find_if(b.begin(), b.end(), [&](const FactorMultiplicity& fb) {
            return fb.multiplicity == fa.multiplicity && fb.factor.approxEqual(fa.factor, tol);
        });
        if (it == b.end()) return false;
        b.erase(it);
    }
    return true;
}

}  // namespace

TEST_CASE("Newton polygon examples") {
    const auto airy = newtonPolygon(airyAtInfinity()).slopes();
    REQUIRE(airy.size() == 1);
    CHECK(airy[0].first == Rational(3, 2));
    CHECK(airy[0].second == 2);
    CHECK(irregularity(parseOperator("z^2*D + 1")) == Rational(1));
    CHECK(irregularity(parseOperator("z*D - (1/2)")) == Rational(0));
    CHECK(newtonPolygon(parseOperator("z*D - (1/2)")).onlySlopeZero());
}

TEST_CASE("property: Newton slopes match the brute-force hull") {
    gen::Rng r(3);
    for (int trial = 0; trial < 300; ++trial) {
        const DiffOp p = randomOperator(r);
        const NewtonPolygon np = newtonPolygon(p);
        const auto expect = bruteSlopes(np.points, toDeltaForm(p).order());
        CHECK(np.slopes() == expect);
    }
}

TEST_CASE("Airy exponential factors and formal solutions") {
    const auto fs = exponentialFactors(airyAtInfinity());
    REQUIRE(fs.size() == 2);
    for (const auto& f : fs) {
        CHECK(f.multiplicity == 1);
        REQUIRE(f.factor.body().terms().size() == 1);
        CHECK(f.factor.body().terms().begin()->first == Rational(-3, 2));
        CHECK(std::abs(std::abs(f.factor.body().leadingCoefficient()) - 2.0 / 3) < 1e-10);
    }
    const HltDatum h = formalSolutions(airyAtInfinity(), 8);
    CHECK(h.ramification == 2);
    REQUIRE(h.rank() == 2);
    for (const auto& s : h.solutions) {
        CHECK(std::abs(s.exponent - Complex(0.25)) < 1e-12);
        const double sign = s.factor.body().leadingCoefficient().real() > 0 ? 1.0 : -1.0;
        CHECK(std::abs(s.series[0].coefficient(Rational(3, 2)) - Complex(sign * 5.0 / 48)) < 1e-12);
    }
    REQUIRE(h.galoisOrbits.size() == 1);
    CHECK(h.galoisOrbits[0].size() == 2);
}

TEST_CASE("rank one examples") {
    const HltDatum h = formalSolutions(parseOperator("z^2*D + 1"), 4);
    REQUIRE(h.rank() == 1);
    CHECK(h.solutions[0].factor.approxEqual(ExponentialFactor(mono(1, -1))));
    CHECK(std::abs(h.solutions[0].exponent) < 1e-14);
    CHECK(h.solutions[0].series[0].terms().size() == 1);

    for (Complex lambda : {Complex(0.5), Complex(1.0 / 3), Complex(0.7, 0.2)}) {
        const DiffOp p(std::vector<PuiseuxSeries>{PuiseuxSeries::constant(-lambda), mono(1, 1)});
        const Eigen::MatrixXcd M = formalMonodromy(formalSolutions(p, 4));
        CHECK(std::abs(M(0, 0) - std::exp(2.0 * std::numbers::pi * Complex(0, 1) * lambda)) < 1e-12);
    }
}

TEST_CASE("formal monodromy with a logarithm") {
    const Eigen::MatrixXcd M = formalMonodromy(formalSolutions(parseOperator("z^2*D^2 + z*D"), 4));
    REQUIRE(M.rows() == 2);
    CHECK(std::abs(M(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(M(1, 1) - 1.0) < 1e-12);
    CHECK(std::abs(M(0, 1)) < 1e-12);
    CHECK(std::abs(M(1, 0) - Complex(0, 2 * std::numbers::pi)) < 1e-12);
}

TEST_CASE("Airy formal monodromy swaps the conjugate solutions") {
    const Eigen::MatrixXcd M = formalMonodromy(formalSolutions(airyAtInfinity(), 6));
    CHECK(std::abs(M(0, 0)) < 1e-12);
    CHECK(std::abs(M(0, 1) - Complex(0, 1)) < 1e-12);
    CHECK(std::abs(M(1, 0) - Complex(0, 1)) < 1e-12);
}

TEST_CASE("property: residual of truncated formal solutions") {
    gen::Rng r(19);
    std::vector<DiffOp> ops{airyAtInfinity(), parseOperator("z^2*D + 1"),
                            parseOperator("z^4*D^2 + (2.3*z^3+3*z^2)*D + 2 + 0.1*z"),
                            parseOperator("z^3*D^2 + (3*z^2 + z)*D - 2")};
    for (int trial = 0; trial < 40; ++trial) ops.push_back(randomOperator(r));
    for (const DiffOp& p : ops) {
        const int N = 6;
        const HltDatum h = formalSolutions(p, N);
        for (const auto& s : h.solutions) {
            if (s.logDepth > 0) continue;
            const DiffOp q = gaugeExp(p, s.factor, s.exponent);
            const PuiseuxSeries exact(s.series[0].terms());
            std::optional<Rational> omega;
            for (const auto& b : toDeltaForm(q).coeffs())
                if (!b.isZero()) omega = extMin(omega, valuation(b));
            const PuiseuxSeries res = applyToSeries(q, exact);
            // Exact cancellation below the truncation is the expected outcome.
            if (res.isZero() || !omega) continue;
            const Rational bound = *omega + Rational(N - p.order(), s.ramification);
            bool small = true;
            for (const auto& [e, c] : res.terms())
                if (e < bound && std::abs(c) > 1e-8 * std::max(1.0, exact.maxAbsCoefficient())) small = false;
            CHECK(small);
        }
    }
}

TEST_CASE("property: slope and factor consistency, regularity dichotomy") {
    gen::Rng r(29);
    for (int trial = 0; trial < 150; ++trial) {
        const DiffOp p = randomOperator(r);
        const auto fs = exponentialFactors(p);
        const auto slopes = newtonPolygon(p).slopes();
        for (const auto& [k, len] : slopes) {
            if (k.isZero()) continue;
            int total = 0;
            for (const auto& f : fs)
                if (!f.factor.isZero() && f.factor.poleOrder() == k) total += f.multiplicity;
            CHECK(total == len);
        }
        for (const auto& f : fs) {
            if (f.factor.isZero()) continue;
            CHECK(std::any_of(slopes.begin(), slopes.end(), [&](const auto& s) { return s.first == f.factor.poleOrder(); }));
        }
        const bool onlyZero = fs.size() == 1 && fs[0].factor.isZero() && fs[0].multiplicity == p.order();
        CHECK(fuchsianTest(p) == onlyZero);
    }
}

TEST_CASE("property: factor set is closed under the deck rotation") {
    gen::Rng r(37);
    std::vector<DiffOp> ops{airyAtInfinity(), parseOperator("z^5*D^3 - 1"), parseOperator("z^3*D^2 - z")};
    for (int trial = 0; trial < 60; ++trial) ops.push_back(randomOperator(r));
    for (const DiffOp& p : ops) {
        const HltDatum h = formalSolutions(p, 3);
        for (const auto& s : h.solutions) {
            const ExponentialFactor rot = s.factor.rotated();
            CHECK(std::any_of(h.solutions.begin(), h.solutions.end(),
                              [&](const FormalSolution& t) { return t.factor.approxEqual(rot, 1e-8); }));
        }
    }
}

TEST_CASE("property: gauge equivariance of the factors") {
    gen::Rng r(53);
    for (int trial = 0; trial < 100; ++trial) {
        const DiffOp p = randomOperator(r);
        const ExponentialFactor g(gen::polarSeries(r, 2, 2, 1));
        auto shifted = exponentialFactors(p);
        for (auto& f : shifted) f.factor = f.factor - g;
        CHECK(sameFactorSet(exponentialFactors(gaugeExp(p, g, 0.0)), shifted, 1e-8));
    }
}
