#include "rhlab/stokes_geometry.hpp"

#include "rhlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rhlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double DirectionSet::period() const { return kTwoPi * static_cast<double>(ramification); }

double StokesMatrixSet::period() const { return kTwoPi * static_cast<double>(ramification); }

DirectionSet stokesDirections(const std::vector<ExponentialFactor>& factors, std::int64_t ramification) {
    DirectionSet out;
    std::int64_t d = std::max<std::int64_t>(1, ramification);
    for (const auto& f : factors) d = lcm64(d, f.ramification());
    out.ramification = d;
    const double period = out.period();

    std::vector<double> thetas;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        for (std::size_t k = j + 1; k < factors.size(); ++k) {
            const PuiseuxSeries diff = factors[j].body() - factors[k].body();
            if (diff.isZero()) continue;
            const Rational e = *diff.valuation();
            const Complex c = diff.leadingCoefficient();
            // Re(c e^{i e theta}) = 0  <=>  arg c + e theta = pi/2 + m pi.
            const double q = e.toDouble();
            const double step = std::numbers::pi / std::abs(q);
            double theta0 = (std::numbers::pi / 2 - std::arg(c)) / q;
            theta0 = std::fmod(theta0, step);
            if (theta0 < 0) theta0 += step;
            for (double t = theta0; t < period - 1e-12; t += step) thetas.push_back(t);
        }
    }
    std::sort(thetas.begin(), thetas.end());
    for (double t : thetas) {
        if (!out.directions.empty() && std::abs(t - out.directions.back().theta) < 1e-9) continue;
        out.directions.push_back({t});
    }
    if (out.directions.size() > 1 && out.directions.front().theta + period - out.directions.back().theta < 1e-9)
        out.directions.pop_back();
    out.trivial = out.directions.empty();
    return out;
}

double defaultOverlapHalfWidth(const DirectionSet& dirs) {
    const auto& ds = dirs.directions;
    if (ds.empty()) return 0.0;
    double gap = dirs.period();
    for (std::size_t i = 0; i + 1 < ds.size(); ++i) gap = std::min(gap, ds[i + 1].theta - ds[i].theta);
    gap = std::min(gap, ds.front().theta + dirs.period() - ds.back().theta);
    return 0.25 * gap;
}

std::vector<Sector> sectorCover(const DirectionSet& dirs, std::optional<double> halfWidth) {
    if (dirs.trivial || dirs.directions.empty())
        return {Sector{-std::numbers::pi, std::numbers::pi, 0}};
    const double period = dirs.period();
    const double h = halfWidth.value_or(defaultOverlapHalfWidth(dirs));
    if (!(h > 0.0)) throw DomainError("overlap half-width must be positive");

    const std::size_t n = dirs.directions.size();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = dirs.directions[i].theta;
    auto centerAt = [&](std::ptrdiff_t i) {
        const auto nn = static_cast<std::ptrdiff_t>(n);
        std::ptrdiff_t q = i / nn, r = i % nn;
        if (r < 0) {
            r += nn;
            q -= 1;
        }
        return c[static_cast<std::size_t>(r)] + static_cast<double>(q) * period;
    };
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double gap = centerAt(i + 1) - centerAt(i);
        if (!(h < 0.5 * gap)) {
            std::ostringstream msg;
            msg << "overlap half-width " << h << " is not below half of the gap " << gap << " between directions "
                << centerAt(i) << " and " << centerAt(i + 1);
            throw DomainError(msg.str());
        }
    }
    auto sectorAt = [&](std::ptrdiff_t i) {
        Sector s;
        s.lo = 0.5 * (centerAt(i - 1) + centerAt(i)) - h;
        s.hi = 0.5 * (centerAt(i) + centerAt(i + 1)) + h;
        s.determination = static_cast<int>(std::floor((centerAt(i) + std::numbers::pi) / kTwoPi));
        return s;
    };
    // Start at the sector containing 0; on a tie prefer the one centred at a positive angle.
    std::ptrdiff_t start = sectorAt(0).lo <= 0.0 ? 0 : -1;
    std::vector<Sector> cover;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) cover.push_back(sectorAt(start + i));
    return cover;
}

std::vector<Sector> overlaps(const std::vector<Sector>& cover, double period) {
    std::vector<Sector> out;
    if (cover.size() < 2) return out;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        const Sector& a = cover[i];
        Sector b = cover[(i + 1) % cover.size()];
        if (i + 1 == cover.size()) {
            b.lo += period;
            b.hi += period;
        }
        Sector o{b.lo, a.hi, 0};
        o.determination = static_cast<int>(std::floor((o.center() + std::numbers::pi) / kTwoPi));
        out.push_back(o);
    }
    return out;
}

bool asymptoticallyNonPositive(const PuiseuxSeries& g, double lo, double hi, int samples) {
    const double scale = std::max(1.0, g.maxAbsCoefficient());
    std::vector<double> angles;
    for (int s = 0; s < samples; ++s) angles.push_back(samples == 1 ? lo : lo + (hi - lo) * s / (samples - 1));
    // Zeros of the leading term, where the next term decides.
    if (!g.isZero() && *g.valuation() < Rational(0)) {
        const double e = g.valuation()->toDouble();
        const Complex c = g.leadingCoefficient();
        const double step = std::numbers::pi / std::abs(e);
        double t = (std::numbers::pi / 2 - std::arg(c)) / e;
        t -= std::ceil((t - lo) / step) * step;
        for (; t <= hi; t += step)
            if (t >= lo) angles.push_back(t);
    }
    for (double theta : angles) {
        double lead = 0.0;
        for (const auto& [e, c] : g.terms()) {
            if (!(e < Rational(0))) break;
            const double re = (c * std::exp(Complex(0.0, e.toDouble() * theta))).real();
            if (std::abs(re) > 1e-9 * scale) {
                lead = re;
                break;
            }
        }
        if (lead > 0.0) return false;
    }
    return true;
}

std::string DominancePattern::toString() const {
    std::string out;
    for (std::size_t j = 0; j < allowed.size(); ++j) {
        if (j) out += '/';
        for (bool a : allowed[j]) out += a ? '*' : '0';
    }
    return out;
}

DominancePattern dominancePattern(const std::vector<ExponentialFactor>& factors, const Sector& overlap) {
    DominancePattern p;
    p.context = overlap;
    const std::size_t m = factors.size();
    p.allowed.assign(m, std::vector<bool>(m, true));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            if (j != k)
                p.allowed[j][k] =
                    asymptoticallyNonPositive(factors[k].body() - factors[j].body(), overlap.lo, overlap.hi);
    return p;
}

ValidationReport validateStokesSet(const StokesMatrixSet& s, double tol) {
    ValidationReport rep;
    auto violate = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    const int m = s.rank();
    const auto ov = overlaps(s.cover, s.period());
    if (s.matrices.size() != ov.size()) {
        violate("expected " + std::to_string(ov.size()) + " transition matrices, found " +
                std::to_string(s.matrices.size()));
        return rep;
    }
    if (s.formalMonodromy.rows() != m || s.formalMonodromy.cols() != m)
        violate("formal monodromy has the wrong shape");
    for (std::size_t i = 0; i < ov.size(); ++i) {
        const Eigen::MatrixXcd& S = s.matrices[i];
        const std::string where = "overlap " + std::to_string(i);
        if (S.rows() != m || S.cols() != m) {
            violate(where + ": matrix has the wrong shape");
            continue;
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(S);
        lu.setThreshold(tol);
        if (!lu.isInvertible()) violate("(a) " + where + ": matrix is singular");
        const DominancePattern pat = dominancePattern(s.factors, ov[i]);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                if (!pat.allowed[j][k] && std::abs(S(j, k)) > tol)
                    violate("(b) " + where + ": entry (" + std::to_string(j) + "," + std::to_string(k) +
                            ") is nonzero in a forbidden slot");
        for (int j = 0; j < m; ++j) {
            bool strict = true;
            for (int k = 0; k < m; ++k)
                if (k != j && pat.allowed[j][k] && pat.allowed[k][j]) strict = false;
            if (strict && std::abs(S(j, j) - Complex(1.0)) > tol)
                violate("(c) " + where + ": diagonal entry " + std::to_string(j) + " differs from 1");
        }
    }
    return rep;
}

Eigen::MatrixXcd monodromyFromStokes(const StokesMatrixSet& s, double tol) {
    const ValidationReport rep = validateStokesSet(s, tol);
    if (!rep.valid) throw DomainError("invalid Stokes set: " + rep.violations.front());
    const int m = s.rank();
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(m, m);
    if (s.cover.size() > 1) {
        // Transitions crossed by one turn: up to the translate of sector 0 by 2 pi, or failing
        // that (a cover that is not invariant under a full turn) the first sector containing
        // the image of its centre.
        const Sector& first = s.cover.front();
        auto nextSector = [&](std::size_t i) {
            Sector next = s.cover[(i + 1) % s.cover.size()];
            if (i + 1 == s.cover.size()) {
                next.lo += s.period();
                next.hi += s.period();
            }
            return next;
        };
        auto walk = [&](auto&& stop) {
            Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(m, m);
            for (std::size_t i = 0; i < s.matrices.size(); ++i) {
                Q = s.matrices[i] * Q;
                if (stop(nextSector(i))) return std::optional<Eigen::MatrixXcd>(Q);
            }
            return std::optional<Eigen::MatrixXcd>();
        };
        auto image = walk([&](const Sector& x) {
            return std::abs(x.lo - first.lo - kTwoPi) < 1e-9 && std::abs(x.hi - first.hi - kTwoPi) < 1e-9;
        });
        if (!image) image = walk([&](const Sector& x) { return x.contains(first.center() + kTwoPi); });
        if (image) P = *image;
    }
    return P.inverse() * s.formalMonodromy;
}

}  // namespace rhlab
