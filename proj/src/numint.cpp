#include "rhlab/numint.hpp"

#include "rhlab/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rhlab {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kChunk = 0.05;
constexpr double kAbsTol = 1e-14;
constexpr double kRelTol = 1e-12;

struct Term {
    double exponent;
    Complex coeff;
};

// Coefficients of the companion system in the chosen state convention.
class Companion {
public:
    Companion(const DiffOp& p, StateKind kind) : kind_(kind) {
        const std::vector<PuiseuxSeries> src = kind == StateKind::Delta ? toDeltaForm(p).coeffs() : p.coeffs();
        for (const auto& s : src) {
            std::vector<Term> t;
            for (const auto& [e, c] : s.terms()) t.push_back({e.toDouble(), c});
            coeffs_.push_back(std::move(t));
        }
        while (coeffs_.size() > 1 && coeffs_.back().empty()) coeffs_.pop_back();
    }

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    StateKind kind() const { return kind_; }

    // out[k] = -c_k / c_m for k < m.
    void ratios(Complex z, Complex logz, std::vector<Complex>& out) const {
        const int m = order();
        out.assign(static_cast<std::size_t>(m), 0.0);
        const Complex lead = eval(coeffs_.back(), z, logz);
        double scale = std::abs(lead);
        for (int k = 0; k < m; ++k) {
            out[static_cast<std::size_t>(k)] = eval(coeffs_[static_cast<std::size_t>(k)], z, logz);
            scale = std::max(scale, std::abs(out[static_cast<std::size_t>(k)]));
        }
        if (std::abs(lead) <= 1e-14 * scale || !std::isfinite(std::abs(lead))) {
            std::ostringstream msg;
            msg << "leading coefficient vanishes near z = " << z;
            throw PipelineError(msg.str());
        }
        for (auto& r : out) r = -r / lead;
    }

private:
    static Complex eval(const std::vector<Term>& terms, Complex z, Complex logz) {
        Complex s = 0.0;
        for (const Term& t : terms) {
            if (z == Complex(0.0)) {
                if (t.exponent < 0) throw PipelineError("coefficient singular at z = 0");
                if (t.exponent == 0) s += t.coeff;
                continue;
            }
            s += t.coeff * std::exp(t.exponent * logz);
        }
        return s;
    }

    StateKind kind_;
    std::vector<std::vector<Term>> coeffs_;
};

// Path z(s): a ray (theta fixed, s = log r or s = r) or an arc (r fixed, s = theta).
struct Path {
    bool arc = false;
    bool logParam = true;
    double theta = 0.0;
    double radius = 0.0;

    void at(double s, Complex& z, Complex& logz, Complex& dz, Complex& dlogz) const {
        if (arc) {
            logz = Complex(std::log(radius), s);
            z = std::polar(radius, s);
            dlogz = Complex(0.0, 1.0);
            dz = z * dlogz;
        } else if (logParam) {
            logz = Complex(s, theta);
            z = std::exp(logz);
            dlogz = 1.0;
            dz = z;
        } else {
            z = std::polar(s, theta);
            logz = s > 0 ? Complex(std::log(s), theta) : Complex(-HUGE_VAL, theta);
            dz = std::polar(1.0, theta);
            dlogz = s > 0 ? dz / z : Complex(0.0);
        }
    }
};

// Linear solution state with a running log-scale; for order 1 the state holds log u.
struct Walker {
    const Companion& comp;
    Path path;
    bool riccati;
    mutable std::vector<Complex> ratio;

    void operator()(const State& x, State& dxdt, double s) const {
        Complex z, logz, dz, dlogz;
        path.at(s, z, logz, dz, dlogz);
        comp.ratios(z, logz, ratio);
        const Complex mult = comp.kind() == StateKind::Delta ? dlogz : dz;
        dxdt.resize(x.size());
        if (riccati) {
            const Complex d = mult * ratio[0];
            dxdt[0] = d.real();
            dxdt[1] = d.imag();
            return;
        }
        const std::size_t m = x.size() / 2;
        Complex last = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const Complex y(x[2 * k], x[2 * k + 1]);
            last += ratio[k] * y;
            if (k > 0) {
                const Complex d = mult * y;
                dxdt[2 * (k - 1)] = d.real();
                dxdt[2 * (k - 1) + 1] = d.imag();
            }
        }
        const Complex d = mult * last;
        dxdt[2 * (m - 1)] = d.real();
        dxdt[2 * (m - 1) + 1] = d.imag();
    }
};

// Integrates from s0 to s1 with renormalization after each chunk.
void advance(const Companion& comp, const Path& path, double s0, double s1, std::vector<Complex>& y, double& logScale) {
    if (s0 == s1) return;
    const bool riccati = comp.order() == 1;
    Walker sys{comp, path, riccati, {}};
    State x;
    if (riccati) {
        if (y[0] == Complex(0.0)) return;
        const Complex L = std::log(y[0]) + logScale;
        x = {L.real(), L.imag()};
    } else {
        for (const Complex& v : y) {
            x.push_back(v.real());
            x.push_back(v.imag());
        }
    }
    const int chunks = std::max(1, static_cast<int>(std::ceil(std::abs(s1 - s0) / kChunk)));
    auto stepper = odeint::make_controlled(kAbsTol, kRelTol, odeint::runge_kutta_fehlberg78<State>());
    for (int c = 0; c < chunks; ++c) {
        const double a = s0 + (s1 - s0) * c / chunks;
        const double b = s0 + (s1 - s0) * (c + 1) / chunks;
        try {
            odeint::integrate_adaptive(stepper, sys, x, a, b, (b - a) / 8.0);
        } catch (const PipelineError&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineError(std::string("integration failed: ") + e.what());
        }
        if (!riccati) {
            double norm = 0.0;
            for (double v : x) norm = std::max(norm, std::abs(v));
            if (!std::isfinite(norm)) throw PipelineError("integration produced a non-finite state");
            if (norm > 0.0) {
                for (double& v : x) v /= norm;
                logScale += std::log(norm);
            }
        } else if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
            throw PipelineError("integration produced a non-finite state");
        }
    }
    if (riccati) {
        y[0] = std::exp(Complex(0.0, x[1]));
        logScale = x[0];
    } else {
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = Complex(x[2 * k], x[2 * k + 1]);
    }
}

std::vector<Complex> normalized(std::vector<Complex> y, double& logScale) {
    double norm = 0.0;
    for (const Complex& v : y) norm = std::max(norm, std::abs(v));
    if (norm > 0.0 && std::isfinite(norm)) {
        for (Complex& v : y) v /= norm;
        logScale += std::log(norm);
    }
    return y;
}

// Rows are solutions; entries (j,k) carry exp(scaleRows_j - scaleCols_k).
Eigen::MatrixXcd changeOfBasis(const std::vector<RaySample>& to, const std::vector<RaySample>& from) {
    const int m = static_cast<int>(to.size());
    Eigen::MatrixXcd A(m, m), B(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            A(j, k) = to[static_cast<std::size_t>(j)].state[static_cast<std::size_t>(k)];
            B(j, k) = from[static_cast<std::size_t>(j)].state[static_cast<std::size_t>(k)];
        }
    Eigen::MatrixXcd S = A * B.fullPivLu().inverse();
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
            S(j, k) *= std::exp(to[static_cast<std::size_t>(j)].logScale - from[static_cast<std::size_t>(k)].logScale);
    return S;
}

RaySample seed(const FormalSolution& sol, int m, double R, double theta) {
    RaySample s;
    s.radius = R;
    s.theta = theta;
    s.state = sol.evaluate(Complex(std::log(R), theta), m - 1, s.logScale, true);
    s.state = normalized(s.state, s.logScale);
    return s;
}

// Size of the first omitted term group of the truncated expansion at radius R, relative to the leading term.
double truncationError(const FormalSolution& full, int N, double R) {
    const Rational cut(N, full.ramification);
    std::optional<Rational> next;
    for (const auto& s : full.series)
        for (const auto& [e, c] : s.terms())
            if (cut < e && (!next || e < *next)) next = e;
    const double logR = std::abs(std::log(R));
    double size = 0.0;
    for (std::size_t k = 0; k < full.series.size(); ++k) {
        for (const auto& [e, c] : full.series[k].terms()) {
            const bool pick = next ? e == *next : (e == cut);
            if (pick) size += std::abs(c) * std::pow(R, e.toDouble()) * std::pow(logR, static_cast<double>(k));
        }
    }
    return size;
}

RaySample rayEnd(const Companion& comp, double theta, double r0, double r1, RaySample s) {
    Path path{false, true, theta, 0.0};
    advance(comp, path, std::log(r0), std::log(r1), s.state, s.logScale);
    s.radius = r1;
    s.state = normalized(s.state, s.logScale);
    return s;
}

RaySample arcEnd(const Companion& comp, double r, double theta0, double theta1, RaySample s) {
    Path path{true, true, 0.0, r};
    advance(comp, path, theta0, theta1, s.state, s.logScale);
    s.theta = theta1;
    s.state = normalized(s.state, s.logScale);
    return s;
}

// Basis of the sector at (rc, centre) after integrating the seeds outward from R.
std::vector<RaySample> basisAtComparisonRadius(const Companion& comp, const HltDatum& h, double centre, double R,
                                               double rc, int N) {
    const int m = h.rank();
    std::vector<RaySample> out;
    for (int j = 0; j < m; ++j) {
        const FormalSolution& full = h.solutions[static_cast<std::size_t>(j)];
        const double err = truncationError(full, N, R);
        if (err > 1e-3) {
            std::ostringstream msg;
            msg << "truncated expansion " << j << " does not separate at R = " << R << " (tail estimate " << err
                << "); use a radius closer to the singular point or a larger N";
            throw PipelineError(msg.str());
        }
        const RaySample s = seed(full.truncated(N), m, R, centre);
        out.push_back(rc > R ? rayEnd(comp, centre, R, rc, s) : s);
    }
    return out;
}

}  // namespace

Complex RaySample::logPoint() const { return {std::log(radius), theta}; }

RaySolution integrateRay(const DiffOp& p, Direction dir, double r0, double r1, const std::vector<Complex>& init,
                         int samples, StateKind kind, double initLogScale) {
    if (r0 == r1) throw DomainError("integrateRay needs r0 != r1");
    if (r0 < 0 || r1 < 0) throw DomainError("radii must be nonnegative");
    const Companion comp(p, kind);
    if (static_cast<int>(init.size()) != comp.order())
        throw DomainError("initial state must have " + std::to_string(comp.order()) + " entries");
    const bool logParam = r0 > 0 && r1 > 0;
    if (!logParam && kind == StateKind::Delta) throw DomainError("delta states cannot start or end at z = 0");
    samples = std::max(samples, 2);

    Path path{false, logParam, dir.theta, 0.0};
    auto param = [&](double r) { return logParam ? std::log(r) : r; };
    RaySolution sol;
    sol.direction = dir;
    sol.kind = kind;
    RaySample cur{r0, dir.theta, init, initLogScale};
    sol.samples.push_back(cur);
    for (int i = 1; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        const double r = logParam ? r0 * std::pow(r1 / r0, t) : r0 + (r1 - r0) * t;
        advance(comp, path, param(cur.radius), param(r), cur.state, cur.logScale);
        cur.radius = r;
        sol.samples.push_back(cur);
    }
    sol.samples.back().radius = r1;
    if (r1 < r0) std::reverse(sol.samples.begin(), sol.samples.end());
    return sol;
}

RaySample integrateArc(const DiffOp& p, double r, double theta0, double theta1, const RaySample& start,
                       StateKind kind) {
    if (!(r > 0)) throw DomainError("arc radius must be positive");
    const Companion comp(p, kind);
    RaySample s = start;
    s.radius = r;
    Path path{true, true, 0.0, r};
    advance(comp, path, theta0, theta1, s.state, s.logScale);
    s.theta = theta1;
    return s;
}

double defaultMatchRadius(const HltDatum& h) {
    double R = kDefaultMatchRadius;
    for (std::size_t j = 0; j < h.factors.size(); ++j)
        for (std::size_t k = j + 1; k < h.factors.size(); ++k) {
            const PuiseuxSeries diff = h.factors[j].factor.body() - h.factors[k].factor.body();
            if (diff.isZero()) continue;
            const double order = -diff.valuation()->toDouble();
            R = std::min(R, std::pow(std::abs(diff.leadingCoefficient()) / 40.0, 1.0 / order));
        }
    return R;
}

double comparisonRadius(const HltDatum& h, double R) {
    double rc = R;
    for (std::size_t j = 0; j < h.factors.size(); ++j)
        for (std::size_t k = j + 1; k < h.factors.size(); ++k) {
            const PuiseuxSeries diff = h.factors[j].factor.body() - h.factors[k].factor.body();
            if (diff.isZero()) continue;
            const double order = -diff.valuation()->toDouble();
            rc = std::max(rc, std::pow(std::abs(diff.leadingCoefficient()), 1.0 / order));
        }
    return rc;
}

std::vector<RaySolution> matchAsymptotic(const DiffOp& p, const HltDatum& h, const Sector& sector, double R, int N) {
    if (!(R > 0)) R = defaultMatchRadius(h);
    const Companion comp(p, StateKind::Delta);
    const int m = h.rank();
    const double centre = sector.center();
    const double rc = comparisonRadius(h, R);
    std::vector<RaySolution> out;
    for (int j = 0; j < m; ++j) {
        const FormalSolution& full = h.solutions[static_cast<std::size_t>(j)];
        const double err = truncationError(full, N, R);
        if (err > 1e-3) {
            std::ostringstream msg;
            msg << "truncated expansion " << j << " does not separate at R = " << R << " (tail estimate " << err
                << "); use a radius closer to the singular point or a larger N";
            throw PipelineError(msg.str());
        }
        const RaySample s = seed(full.truncated(N), m, R, centre);
        RaySolution sol = rc > R ? integrateRay(p, {centre}, R, rc, s.state, 17, StateKind::Delta, s.logScale)
                                 : RaySolution{{centre}, StateKind::Delta, {s}, -1, 0.0};
        sol.matchedIndex = j;
        sol.matchRadius = R;
        out.push_back(std::move(sol));
    }
    return out;
}

StokesMatrixSet computeStokesMatrices(const DiffOp& p, const HltDatum& h, const std::vector<Sector>& cover, double R,
                                      int N) {
    StokesMatrixSet set;
    if (!(R > 0)) R = defaultMatchRadius(h);
    set.cover = cover;
    set.ramification = h.ramification;
    for (const auto& s : h.solutions) {
        set.factors.push_back(s.factor);
        set.exponents.push_back(s.exponent);
    }
    set.formalMonodromy = formalMonodromy(h);
    if (cover.size() < 2) return set;

    const Companion comp(p, StateKind::Delta);
    const double rc = comparisonRadius(h, R);
    const double period = set.period();
    const auto ov = overlaps(cover, period);
    const std::size_t n = cover.size();

    std::vector<std::vector<RaySample>> bases;
    for (std::size_t i = 0; i <= n; ++i) {
        const double centre = i < n ? cover[i].center() : cover[0].center() + period;
        bases.push_back(basisAtComparisonRadius(comp, h, centre, R, rc, N));
    }

    const double chain[] = {1.0, 0.85, 0.7};
    for (std::size_t i = 0; i < n; ++i) {
        const double mid = ov[i].center();
        std::vector<RaySample> a, b;
        for (const auto& s : bases[i]) a.push_back(arcEnd(comp, rc, s.theta, mid, s));
        for (const auto& s : bases[i + 1]) b.push_back(arcEnd(comp, rc, s.theta, mid, s));
        Eigen::MatrixXcd S0;
        double residual = 0.0;
        for (double f : chain) {
            std::vector<RaySample> aa, bb;
            for (const auto& s : a) aa.push_back(f == 1.0 ? s : rayEnd(comp, mid, rc, f * rc, s));
            for (const auto& s : b) bb.push_back(f == 1.0 ? s : rayEnd(comp, mid, rc, f * rc, s));
            const Eigen::MatrixXcd S = changeOfBasis(bb, aa);
            if (f == 1.0) S0 = S;
            else residual = std::max(residual, (S - S0).cwiseAbs().maxCoeff() / std::max(1.0, S0.cwiseAbs().maxCoeff()));
        }
        if (!(residual <= 1e-6)) {
            std::ostringstream msg;
            msg << "change of basis at overlap " << i << " is inconsistent along the radius chain (residual "
                << residual << ")";
            throw PipelineError(msg.str());
        }
        set.matrices.push_back(S0);
    }
    return set;
}

Eigen::MatrixXcd integratedMonodromy(const DiffOp& p, const HltDatum& h, const std::vector<Sector>& cover, double R,
                                     int N) {
    const Companion comp(p, StateKind::Delta);
    if (!(R > 0)) R = defaultMatchRadius(h);
    const double rc = comparisonRadius(h, R);
    const double centre = cover.empty() ? 0.0 : cover.front().center();
    const auto start = basisAtComparisonRadius(comp, h, centre, R, rc, N);
    std::vector<RaySample> end;
    for (const auto& s : start) end.push_back(arcEnd(comp, rc, centre, centre + kTwoPi, s));
    return changeOfBasis(end, start);
}

StokesPipeline runStokesPipeline(const DiffOp& p, double R, int N, double halfWidth, bool numeric) {
    if (N < 1) throw DomainError("truncation order N must be at least 1");
    StokesPipeline out;
    // A few extra orders let the separation check see the first omitted terms.
    out.hlt = formalSolutions(p, N + 2 * static_cast<int>(std::max<std::int64_t>(1, p.ramification())) + 4);
    std::vector<ExponentialFactor> factors;
    for (const auto& s : out.hlt.solutions) factors.push_back(s.factor);
    out.directions = stokesDirections(factors, out.hlt.ramification);
    out.cover = sectorCover(out.directions, halfWidth > 0 ? std::optional<double>(halfWidth) : std::nullopt);
    out.matchRadius = R > 0 ? R : defaultMatchRadius(out.hlt);
    out.matchOrder = N;
    if (numeric) {
        out.stokes = computeStokesMatrices(p, out.hlt, out.cover, out.matchRadius, N);
    } else {
        out.stokes.cover = out.cover;
        out.stokes.ramification = out.hlt.ramification;
        out.stokes.factors = factors;
        for (const auto& s : out.hlt.solutions) out.stokes.exponents.push_back(s.exponent);
        out.stokes.formalMonodromy = formalMonodromy(out.hlt);
    }
    return out;
}

std::string toString(EstimateVerdict v) {
    switch (v) {
        case EstimateVerdict::Pass: return "PASS";
        case EstimateVerdict::Fail: return "FAIL";
        case EstimateVerdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

EstimateReport estimateCheck(const RaySolution& u, const HltDatum& h, int j, int N) {
    if (j < 0 || j >= h.rank()) throw DomainError("solution index out of range");
    const FormalSolution sol = h.solutions[static_cast<std::size_t>(j)].truncated(N);
    EstimateReport rep;
    rep.expected = sol.exponent.real() + static_cast<double>(N) / static_cast<double>(sol.ramification);
    std::vector<double> xs, ys;
    for (const RaySample& s : u.samples) {
        if (!(s.radius > 0)) continue;
        const Complex lp = s.logPoint();
        double scale = 0.0;
        const Complex approx = sol.evaluate(lp, 0, scale)[0];
        const Complex diff = s.state[0] * std::exp(s.logScale - scale) - approx;
        if (std::abs(diff) < 1e-11 * std::abs(approx)) continue;
        xs.push_back(lp.real());
        ys.push_back(std::log(std::abs(diff)) + scale - sol.factor.body().evalLog(lp).real());
    }
    rep.samplesUsed = static_cast<int>(xs.size());
    if (xs.empty()) {
        rep.exact = true;
        rep.verdict = EstimateVerdict::Pass;
        rep.slope = rep.expected;
        rep.message = "difference at the rounding floor on every sample";
        return rep;
    }
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    rep.decades = (*hi - *lo) / std::log(10.0);
    if (xs.size() < 3 || rep.decades < 1.0) {
        rep.verdict = EstimateVerdict::Inconclusive;
        rep.message = "usable radius range below one decade";
        return rep;
    }
    const double nx = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / nx;
        my += ys[i] / nx;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    rep.slope = sxy / sxx;
    rep.verdict = rep.slope >= rep.expected - 0.25 ? EstimateVerdict::Pass : EstimateVerdict::Fail;
    std::ostringstream msg;
    msg << "fitted slope " << rep.slope << " against " << rep.expected << " over " << rep.decades << " decades";
    rep.message = msg.str();
    return rep;
}

}  // namespace rhlab
