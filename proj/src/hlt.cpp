#include "rhlab/hlt.hpp"

#include "polyroots.hpp"
#include "rhlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace rhlab {

namespace {

constexpr double kRootMergeTolerance = 1e-6;
constexpr double kResonanceTolerance = 1e-9;

}  // namespace

// ---------------------------------------------------------------------------
// Newton polygon

std::vector<std::pair<Rational, int>> NewtonPolygon::slopes() const {
    std::vector<std::pair<Rational, int>> out;
    for (const auto& e : edges) out.emplace_back(e.slope, e.length);
    return out;
}

bool NewtonPolygon::onlySlopeZero() const {
    return std::all_of(edges.begin(), edges.end(), [](const NewtonEdge& e) { return e.slope.isZero(); });
}

NewtonPolygon newtonPolygon(const DeltaForm& d) {
    NewtonPolygon poly;
    for (int k = 0; k <= d.order(); ++k)
        if (auto v = d.coeff(k).valuation()) poly.points.emplace_back(k, *v);
    if (poly.points.empty()) return poly;

    Rational minOrd = poly.points.front().second;
    for (const auto& [k, v] : poly.points) minOrd = std::min(minOrd, v);
    int j0 = 0;
    for (const auto& [k, v] : poly.points)
        if (v == minOrd) j0 = k;

    if (j0 > 0) {
        poly.edges.push_back({Rational(0), j0, 0, minOrd});
        poly.hull.emplace_back(0, minOrd);
    }
    poly.hull.emplace_back(j0, minOrd);

    // Lower convex chain from (j0, minOrd) to the last point.
    int cur = j0;
    Rational curOrd = minOrd;
    const int last = poly.points.back().first;
    while (cur < last) {
        std::optional<Rational> best;
        int bestK = cur;
        for (const auto& [k, v] : poly.points) {
            if (k <= cur) continue;
            const Rational s = (v - curOrd) / Rational(k - cur);
            if (!best || s < *best || (s == *best && k > bestK)) {
                best = s;
                bestK = k;
            }
        }
        poly.edges.push_back({*best, bestK - cur, cur, curOrd});
        curOrd = curOrd + *best * Rational(bestK - cur);
        cur = bestK;
        poly.hull.emplace_back(cur, curOrd);
    }
    return poly;
}

NewtonPolygon newtonPolygon(const DiffOp& p) { return newtonPolygon(toDeltaForm(p)); }

Rational irregularity(const DiffOp& p) {
    const auto poly = newtonPolygon(p);
    Rational best(0);
    for (const auto& e : poly.edges) best = std::max(best, e.slope);
    return best;
}

// ---------------------------------------------------------------------------
// Exponential factors

namespace {

struct FactorSearch {
    int maxDepth;
    std::vector<FactorMultiplicity> found;

    void run(const DeltaForm& op, const PuiseuxSeries& acc, const ExtRational& bound, int depth, bool flagged) {
        if (depth > maxDepth)
            throw PipelineError("exponential factor recursion exceeded depth " + std::to_string(maxDepth));
        const NewtonPolygon poly = newtonPolygon(op);
        for (const NewtonEdge& edge : poly.edges) {
            if (bound && !(edge.slope < *bound)) continue;
            if (edge.slope.isZero()) {
                found.push_back({ExponentialFactor(acc), edge.length, flagged});
                continue;
            }
            const Rational k = edge.slope;
            std::vector<Complex> charPoly;
            for (int j = edge.startIndex; j <= edge.startIndex + edge.length; ++j) {
                const Rational height = edge.startOrdinate + k * Rational(j - edge.startIndex);
                charPoly.push_back(op.coeff(j).coefficient(height));
            }
            const auto roots = detail::polynomialRoots(charPoly);
            const auto clusters = detail::clusterPolynomialRoots(charPoly, roots, kRootMergeTolerance);
            for (const auto& cl : clusters) {
                if (std::abs(cl.value) < 1e-14)
                    throw PipelineError("characteristic equation has a vanishing root on a positive slope");
                // e^{c z^{-k}} contributes delta -> -k c z^{-k}; X = -k c.
                const Complex c = detail::snapToRational(-cl.value / k.toDouble());
                const PuiseuxSeries piece = PuiseuxSeries::monomial(c, -k);
                const bool merged = cl.multiplicity > 1 && cl.spread > 0.0;
                const DeltaForm twisted = gaugeExp(op, piece, 0.0);
                const std::size_t before = found.size();
                run(twisted, acc + piece, k, depth + 1, flagged || merged);
                int total = 0;
                for (std::size_t i = before; i < found.size(); ++i) total += found[i].multiplicity;
                if (total != cl.multiplicity)
                    throw PipelineError("slope " + k.toString() + ": recovered multiplicity " +
                                        std::to_string(total) + " differs from root multiplicity " +
                                        std::to_string(cl.multiplicity));
            }
        }
    }
};

// Lexicographic from the most singular exponent, larger real part first.
bool factorBefore(const ExponentialFactor& a, const ExponentialFactor& b) {
    const auto& ta = a.body().terms();
    const auto& tb = b.body().terms();
    auto ia = ta.begin();
    auto ib = tb.begin();
    for (; ia != ta.end() && ib != tb.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first;
        const Complex ca = ia->second, cb = ib->second;
        if (std::abs(ca.real() - cb.real()) > 1e-9) return ca.real() > cb.real();
        if (std::abs(ca.imag() - cb.imag()) > 1e-9) return ca.imag() > cb.imag();
    }
    return ia != ta.end() && ib == tb.end();
}

}  // namespace

std::vector<FactorMultiplicity> exponentialFactors(const DiffOp& p, int maxDepth) {
    FactorSearch search{maxDepth, {}};
    search.run(toDeltaForm(p), PuiseuxSeries(), std::nullopt, 0, false);
    auto out = std::move(search.found);
    std::stable_sort(out.begin(), out.end(), [](const FactorMultiplicity& a, const FactorMultiplicity& b) {
        return factorBefore(a.factor, b.factor);
    });
    // Identical factors reached along different branches are merged.
    std::vector<FactorMultiplicity> merged;
    for (auto& f : out) {
        if (!merged.empty() && merged.back().factor.approxEqual(f.factor)) {
            merged.back().multiplicity += f.multiplicity;
            merged.back().illConditioned = merged.back().illConditioned || f.illConditioned;
        } else {
            merged.push_back(std::move(f));
        }
    }
    return merged;
}

// ---------------------------------------------------------------------------
// Formal solutions

namespace {

using LogPoly = std::vector<Complex>;  // coefficients of powers of log z

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Taylor coefficients of p at mu: p(mu + t) = sum_q out[q] t^q.
std::vector<Complex> taylorAt(const std::vector<Complex>& p, Complex mu) {
    std::vector<Complex> powers(p.size(), 1.0);
    for (std::size_t i = 1; i < p.size(); ++i) powers[i] = powers[i - 1] * mu;
    std::vector<Complex> out(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k)
        for (std::size_t q = 0; q <= k; ++q)
            out[q] += p[k] * binom(static_cast<int>(k), static_cast<int>(q)) * powers[k - q];
    return out;
}

// Applies p(mu + d/dl) to a polynomial in l.
LogPoly applyShifted(const std::vector<Complex>& p, Complex mu, const LogPoly& a) {
    const auto c = taylorAt(p, mu);
    LogPoly out(a.size(), 0.0);
    for (std::size_t q = 0; q < c.size(); ++q) {
        if (c[q] == Complex(0.0)) continue;
        for (std::size_t j = q; j < a.size(); ++j)
            out[j - q] += c[q] * a[j] * (factorial(static_cast<int>(j)) / factorial(static_cast<int>(j - q)));
    }
    return out;
}

// Solves p(mu + d/dl) A = R where mu is a root of multiplicity r; integration constants are zero.
LogPoly solveShifted(const std::vector<Complex>& p, Complex mu, int r, const LogPoly& rhs) {
    const auto c = taylorAt(p, mu);
    const int L = static_cast<int>(rhs.size()) - 1;
    if (L < 0) return {};
    LogPoly b(static_cast<std::size_t>(L + 1), 0.0);
    const Complex lead = c[static_cast<std::size_t>(r)];
    if (std::abs(lead) < 1e-300) throw PipelineError("recursion matrix singular beyond resonance handling");
    for (int j = L; j >= 0; --j) {
        Complex acc = rhs[static_cast<std::size_t>(j)];
        for (int t = 1; r + t < static_cast<int>(c.size()) && j + t <= L; ++t)
            acc -= c[static_cast<std::size_t>(r + t)] * b[static_cast<std::size_t>(j + t)] *
                   (factorial(j + t) / factorial(j));
        b[static_cast<std::size_t>(j)] = acc / lead;
    }
    LogPoly a(static_cast<std::size_t>(L + 1 + r), 0.0);
    for (int j = 0; j <= L; ++j)
        a[static_cast<std::size_t>(j + r)] = b[static_cast<std::size_t>(j)] * (factorial(j) / factorial(j + r));
    while (a.size() > 1 && std::abs(a.back()) < 1e-300) a.pop_back();
    return a;
}

void addInto(LogPoly& acc, const LogPoly& x, Complex scale = 1.0) {
    if (acc.size() < x.size()) acc.resize(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] += scale * x[i];
}

struct RegularPart {
    std::int64_t d = 1;
    Rational base;                                  // minimal ordinate o
    std::vector<std::vector<Complex>> shiftPolys;   // P_{o + n/d}
    std::vector<detail::RootCluster> roots;
};

RegularPart regularPart(const DeltaForm& q, std::int64_t d, int nMax) {
    RegularPart rp;
    rp.d = d;
    std::optional<Rational> o;
    for (int k = 0; k <= q.order(); ++k)
        if (auto v = q.coeff(k).valuation()) o = o ? std::min(*o, *v) : *v;
    rp.base = *o;
    for (int n = 0; n <= nMax; ++n) {
        const Rational s = rp.base + Rational(n, d);
        std::vector<Complex> poly(static_cast<std::size_t>(q.order() + 1), 0.0);
        for (int k = 0; k <= q.order(); ++k) poly[static_cast<std::size_t>(k)] = q.coeff(k).coefficient(s);
        rp.shiftPolys.push_back(std::move(poly));
    }
    auto roots = detail::polynomialRoots(rp.shiftPolys[0]);
    rp.roots = detail::clusterPolynomialRoots(rp.shiftPolys[0], roots, kRootMergeTolerance);
    for (auto& cl : rp.roots) cl.value = detail::snapToRational(cl.value);
    return rp;
}

int rootMultiplicity(const RegularPart& rp, Complex mu) {
    for (const auto& cl : rp.roots)
        if (std::abs(cl.value - mu) < kResonanceTolerance * std::max(1.0, std::abs(mu))) return cl.multiplicity;
    return 0;
}

}  // namespace

FormalSolution FormalSolution::truncated(int n) const {
    FormalSolution out = *this;
    out.truncation = std::min(n, truncation);
    const Rational cut(out.truncation + 1, ramification);
    for (auto& s : out.series) s = s.truncatedAt(cut);
    return out;
}

std::vector<Complex> FormalSolution::evaluate(Complex logPoint, int derivatives, double& logScale,
                                              bool useDelta) const {
    // G_{q+1} = f' G_q + z^{-1} (lambda G_q + delta G_q), where delta acts on log powers too.
    // The delta variant drops the z^{-1} and uses delta f for f'.
    std::vector<PuiseuxSeries> g = series;
    const Rational shift = useDelta ? Rational(0) : Rational(-1);
    const PuiseuxSeries fPrime = factor.body().delta().shifted(shift);
    const Complex phase = factor.body().evalLog(logPoint) + exponent * logPoint;
    logScale = phase.real();
    const Complex unit = std::exp(Complex(0.0, phase.imag()));
    std::vector<Complex> out;
    for (int q = 0; q <= derivatives; ++q) {
        Complex v = 0.0;
        Complex lp = 1.0;
        for (const auto& gk : g) {
            v += gk.evalLog(logPoint) * lp;
            lp *= logPoint;
        }
        out.push_back(unit * v);
        if (q == derivatives) break;
        std::vector<PuiseuxSeries> next(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            next[k] += fPrime * g[k] + (g[k].scaled(exponent) + g[k].delta()).shifted(shift);
            if (k > 0) next[k - 1] += g[k].scaled(static_cast<double>(k)).shifted(shift);
        }
        g = std::move(next);
    }
    return out;
}

HltDatum formalSolutions(const DiffOp& p, int n, int maxDepth) {
    if (n < 1) throw DomainError("truncation order N must be at least 1");
    HltDatum h;
    h.truncation = n;
    h.factors = exponentialFactors(p, maxDepth);
    std::int64_t d = p.ramification();
    for (const auto& f : h.factors) d = lcm64(d, f.factor.ramification());
    h.ramification = d;
    const DeltaForm base = toDeltaForm(p);

    std::vector<int> groupOf;
    for (std::size_t g = 0; g < h.factors.size(); ++g) {
        const auto& fm = h.factors[g];
        if (fm.illConditioned)
            h.warnings.push_back("characteristic roots merged for factor " + fm.factor.body().toString());
        const DeltaForm q = gaugeExp(base, fm.factor.body(), 0.0);
        const RegularPart rp = regularPart(q, d, n);
        int degree = 0;
        for (int k = 0; k < static_cast<int>(rp.shiftPolys[0].size()); ++k)
            if (rp.shiftPolys[0][static_cast<std::size_t>(k)] != Complex(0.0)) degree = k;
        if (degree != fm.multiplicity)
            throw PipelineError("indicial degree " + std::to_string(degree) + " differs from factor multiplicity " +
                                std::to_string(fm.multiplicity));

        auto roots = rp.roots;
        std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
            if (std::abs(a.value.real() - b.value.real()) > 1e-12) return a.value.real() < b.value.real();
            return a.value.imag() < b.value.imag();
        });
        for (const auto& root : roots) {
            if (root.multiplicity > 1 && root.spread > 0.0)
                h.warnings.push_back("indicial roots merged near " + std::to_string(root.value.real()));
            for (int i = 0; i < root.multiplicity; ++i) {
                std::vector<LogPoly> coeffs(static_cast<std::size_t>(n + 1));
                coeffs[0] = LogPoly(static_cast<std::size_t>(i + 1), 0.0);
                coeffs[0][static_cast<std::size_t>(i)] = 1.0;
                for (int step = 1; step <= n; ++step) {
                    LogPoly rhs;
                    for (int t = 1; t <= step; ++t) {
                        const auto& ps = rp.shiftPolys[static_cast<std::size_t>(t)];
                        if (std::all_of(ps.begin(), ps.end(), [](Complex c) { return c == Complex(0.0); })) continue;
                        const int prev = step - t;
                        const Complex mu = root.value + static_cast<double>(prev) / static_cast<double>(d);
                        addInto(rhs, applyShifted(ps, mu, coeffs[static_cast<std::size_t>(prev)]), -1.0);
                    }
                    const Complex mu = root.value + static_cast<double>(step) / static_cast<double>(d);
                    const int r = rootMultiplicity(rp, mu);
                    if (rhs.empty()) rhs.push_back(0.0);
                    coeffs[static_cast<std::size_t>(step)] = solveShifted(rp.shiftPolys[0], mu, r, rhs);
                }
                FormalSolution sol;
                sol.factor = fm.factor;
                sol.exponent = root.value;
                sol.leadingLogPower = i;
                sol.truncation = n;
                sol.ramification = d;
                std::size_t depth = 0;
                for (const auto& c : coeffs)
                    for (std::size_t k = 0; k < c.size(); ++k)
                        if (std::abs(c[k]) > 0.0) depth = std::max(depth, k);
                sol.logDepth = static_cast<int>(depth);
                sol.series.resize(depth + 1);
                for (std::size_t k = 0; k <= depth; ++k) {
                    PuiseuxSeries::TermMap t;
                    for (int step = 0; step <= n; ++step) {
                        const auto& c = coeffs[static_cast<std::size_t>(step)];
                        if (k < c.size() && c[k] != Complex(0.0)) t.emplace(Rational(step, d), c[k]);
                    }
                    sol.series[k] = PuiseuxSeries(std::move(t), Rational(n + 1, d));
                }
                h.solutions.push_back(std::move(sol));
                groupOf.push_back(static_cast<int>(g));
            }
        }
    }

    // Galois orbits: groups linked by the deck transformation.
    const std::size_t ng = h.factors.size();
    std::vector<std::size_t> parent(ng);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t g = 0; g < ng; ++g) {
        const ExponentialFactor rot = h.factors[g].factor.rotated();
        for (std::size_t g2 = 0; g2 < ng; ++g2)
            if (h.factors[g2].factor.approxEqual(rot)) parent[find(g)] = find(g2);
    }
    std::vector<std::vector<int>> orbits;
    std::vector<int> orbitOfRoot(ng, -1);
    for (std::size_t s = 0; s < h.solutions.size(); ++s) {
        const std::size_t root = find(static_cast<std::size_t>(groupOf[s]));
        if (orbitOfRoot[root] < 0) {
            orbitOfRoot[root] = static_cast<int>(orbits.size());
            orbits.emplace_back();
        }
        orbits[static_cast<std::size_t>(orbitOfRoot[root])].push_back(static_cast<int>(s));
    }
    h.galoisOrbits = std::move(orbits);
    return h;
}

Eigen::MatrixXcd formalMonodromy(const HltDatum& h) {
    const int m = h.rank();
    const double twoPi = 2.0 * std::numbers::pi;
    const Complex twoPiI(0.0, twoPi);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m, m);
    const std::int64_t d = h.ramification;
    for (int j = 0; j < m; ++j) {
        const FormalSolution& sj = h.solutions[static_cast<std::size_t>(j)];
        const ExponentialFactor rot = sj.factor.rotated();
        bool matched = false;
        for (int k = 0; k < m; ++k) {
            const FormalSolution& sk = h.solutions[static_cast<std::size_t>(k)];
            if (!sk.factor.approxEqual(rot)) continue;
            matched = true;
            const Complex offset = (sk.exponent - sj.exponent) * static_cast<double>(d);
            const double steps = std::round(offset.real());
            if (std::abs(offset - Complex(steps, 0.0)) > 1e-7 || steps < 0 || steps > sj.truncation) continue;
            const Rational e(static_cast<std::int64_t>(steps), d);
            // A(l + 2 pi i) at exponent lambda_j + e, coefficient of l^{leadingLogPower_k}.
            const int target = sk.leadingLogPower;
            Complex coeff = 0.0;
            for (int kk = target; kk < static_cast<int>(sj.series.size()); ++kk) {
                const Complex a = sj.series[static_cast<std::size_t>(kk)].coefficient(e);
                if (a == Complex(0.0)) continue;
                Complex shift = 1.0;
                for (int t = 0; t < kk - target; ++t) shift *= twoPiI;
                coeff += a * binom(kk, target) * shift;
            }
            M(j, k) = std::exp(twoPiI * sk.exponent) * coeff;
        }
        if (!matched) throw PipelineError("deck image of a factor is not among the factors");
    }
    return M;
}

}  // namespace rhlab
