#include "rhlab/enhanced.hpp"

#include "rhlab/error.hpp"
#include "rhlab/numint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

namespace rhlab {

namespace {

constexpr double kCoeffZero = 1e-12;

bool sameEnd(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

const char* chartName(Chart c) {
    switch (c) {
        case Chart::Real: return "real";
        case Chart::Radial: return "radial";
        case Chart::Angular: return "angular";
        case Chart::Sector: return "sector";
    }
    return "real";
}

// Real coefficients of phi as a function of the radial or real coordinate.
std::vector<std::pair<Rational, double>> effectiveTerms(const BorderedDomain& dom, const PuiseuxSeries& g) {
    std::vector<std::pair<Rational, double>> out;
    for (const auto& [e, c] : g.terms()) {
        double eff = c.real();
        if (dom.chart == Chart::Radial) eff = (c * std::exp(Complex(0.0, e.toDouble() * dom.param))).real();
        if (std::abs(eff) > kCoeffZero) out.emplace_back(e, eff);
    }
    return out;
}

double powSigned(double x, const Rational& e) {
    if (x >= 0) return std::pow(x, e.toDouble());
    if (!e.isInteger()) throw DomainError("non-integer exponent on negative reals");
    return std::pow(x, static_cast<double>(e.num()));
}

// Sign of the dominant term of g at a flagged endpoint of a one-variable chart: +1, -1, or 0 when bounded.
int endpointGrowth(const BorderedDomain& dom, const PuiseuxSeries& g, double p, bool fromAbove) {
    const auto terms = effectiveTerms(dom, g);
    if (p == 0.0) {
        for (const auto& [e, c] : terms) {
            if (!(e < Rational(0))) break;
            const double side = fromAbove ? 1.0 : powSigned(-1.0, e);
            return c * side > 0 ? 1 : -1;
        }
        return 0;
    }
    if (std::isinf(p)) {
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
            if (!(Rational(0) < it->first)) break;
            const double side = p > 0 ? 1.0 : powSigned(-1.0, it->first);
            return it->second * side > 0 ? 1 : -1;
        }
        return 0;
    }
    return 0;
}

bool hasPolarPart(const PuiseuxSeries& g) {
    for (const auto& [e, c] : g.terms())
        if (e < Rational(0) && std::abs(c) > kCoeffZero) return true;
    return false;
}

bool boundedImpl(const BorderedDomain& dom, const PuiseuxSeries& g, bool aboveOnly) {
    switch (dom.chart) {
        case Chart::Angular:
            return true;
        case Chart::Sector:
            if (!dom.loFlagged) return true;
            return aboveOnly ? asymptoticallyNonPositive(g, dom.lo, dom.hi) : !hasPolarPart(g);
        case Chart::Real:
        case Chart::Radial:
            break;
    }
    auto ok = [&](double p, bool fromAbove) {
        const int growth = endpointGrowth(dom, g, p, fromAbove);
        return aboveOnly ? growth <= 0 : growth == 0;
    };
    if (dom.loFlagged && !ok(dom.lo, true)) return false;
    if (dom.hiFlagged && !ok(dom.hi, false)) return false;
    return true;
}

using SummandKey = std::tuple<int, double, double, bool, bool, double, std::string>;

SummandKey keyOf(const ExpSummand& s) {
    return {static_cast<int>(s.domain.chart), s.domain.lo, s.domain.hi, s.domain.loFlagged, s.domain.hiFlagged,
            s.domain.param, s.phi.body.toString()};
}

}  // namespace

// ---------------------------------------------------------------------------

bool BorderedDomain::operator==(const BorderedDomain& o) const {
    return chart == o.chart && sameEnd(lo, o.lo) && sameEnd(hi, o.hi) && loFlagged == o.loFlagged &&
           hiFlagged == o.hiFlagged && sameEnd(param, o.param);
}

std::string BorderedDomain::toString() const {
    std::ostringstream os;
    os << chartName(chart) << (loFlagged ? "[" : "(") << lo << ", " << hi << (hiFlagged ? "]" : ")");
    if (chart != Chart::Real) os << "@" << param;
    return os.str();
}

double PhiFunction::evaluate(const BorderedDomain& dom, double x, double theta) const {
    double v = 0.0;
    for (const auto& [e, c] : body.terms()) {
        switch (dom.chart) {
            case Chart::Real:
                v += c.real() * powSigned(x, e);
                break;
            case Chart::Radial:
                v += (c * std::exp(Complex(0.0, e.toDouble() * dom.param))).real() * std::pow(x, e.toDouble());
                break;
            case Chart::Angular:
                v += (c * std::polar(std::pow(dom.param, e.toDouble()), e.toDouble() * x)).real();
                break;
            case Chart::Sector:
                v += (c * std::polar(std::pow(x, e.toDouble()), e.toDouble() * theta)).real();
                break;
        }
    }
    return v;
}

std::string PhiFunction::toString() const { return "Re(" + body.toString() + ")"; }

ExpSheaf::ExpSheaf(std::vector<ExpSummand> summands) : summands_(std::move(summands)) {
    std::erase_if(summands_, [](const ExpSummand& s) { return s.domain.empty(); });
    std::stable_sort(summands_.begin(), summands_.end(),
                     [](const ExpSummand& a, const ExpSummand& b) { return keyOf(a) < keyOf(b); });
}

ExpSheaf ExpSheaf::single(const BorderedDomain& dom, const PuiseuxSeries& phi) {
    if (!phi.isExact()) throw DomainError("phi must be an exact series");
    return ExpSheaf({ExpSummand{dom, PhiFunction{phi}}});
}

std::string ExpSheaf::toString() const {
    if (summands_.empty()) return "0";
    std::string out;
    for (const auto& s : summands_) {
        if (!out.empty()) out += " + ";
        out += "E^{" + s.phi.toString() + "} on " + s.domain.toString();
    }
    return out;
}

ExpSheaf punctured(const PuiseuxSeries& phi) {
    const double inf = std::numeric_limits<double>::infinity();
    BorderedDomain neg{Chart::Real, -inf, 0.0, false, true, 0.0};
    BorderedDomain pos{Chart::Real, 0.0, inf, true, false, 0.0};
    return ExpSheaf({ExpSummand{neg, PhiFunction{phi}}, ExpSummand{pos, PhiFunction{phi}}});
}

bool differenceBounded(const BorderedDomain& dom, const PuiseuxSeries& g) { return boundedImpl(dom, g, false); }

bool differenceBoundedAbove(const BorderedDomain& dom, const PuiseuxSeries& g) { return boundedImpl(dom, g, true); }

bool sampledBounded(const BorderedDomain& dom, const PuiseuxSeries& g, bool aboveOnly) {
    const PhiFunction phi{g};
    constexpr int kSamples = 1000;
    auto judge = [&](const std::vector<double>& values) {
        const double ref = 1.0 + std::abs(values.front());
        for (double v : values)
            if ((aboveOnly ? v : std::abs(v)) > 1e2 * ref) return false;
        return true;
    };
    if (dom.chart == Chart::Angular) return true;
    if (dom.chart == Chart::Sector) {
        if (!dom.loFlagged) return true;
        for (int a = 0; a <= 32; ++a) {
            const double theta = dom.lo + (dom.hi - dom.lo) * a / 32.0;
            std::vector<double> vals;
            for (int i = 0; i < kSamples; ++i)
                vals.push_back(phi.evaluate(dom, dom.param * std::pow(1e-9, i / (kSamples - 1.0)), theta));
            if (!judge(vals)) return false;
        }
        return true;
    }
    auto toward = [&](double p, bool fromAbove) {
        std::vector<double> vals;
        for (int i = 0; i < kSamples; ++i) {
            const double t = std::pow(1e-9, i / (kSamples - 1.0));
            double x;
            if (std::isinf(p)) x = (p > 0 ? 1.0 : -1.0) / t;
            else if (p == 0.0) x = fromAbove ? t : -t;
            else x = p + (fromAbove ? 1.0 : -1.0) * std::abs(p) * t * 0.5;
            vals.push_back(phi.evaluate(dom, x));
        }
        return judge(vals);
    };
    if (dom.loFlagged && !toward(dom.lo, true)) return false;
    if (dom.hiFlagged && !toward(dom.hi, false)) return false;
    return true;
}

ExpSheaf convolve(const ExpSheaf& a, const ExpSheaf& b) {
    std::vector<ExpSummand> out;
    for (const auto& x : a.summands()) {
        for (const auto& y : b.summands()) {
            const BorderedDomain& d1 = x.domain;
            const BorderedDomain& d2 = y.domain;
            if (d1.chart != d2.chart) throw DomainError("convolution of summands on different charts");
            if ((d1.chart == Chart::Radial || d1.chart == Chart::Angular) && !sameEnd(d1.param, d2.param))
                throw DomainError("convolution of summands on different chart parameters");
            BorderedDomain d = d1;
            if (sameEnd(d1.lo, d2.lo)) d.loFlagged = d1.loFlagged || d2.loFlagged;
            else if (d2.lo > d1.lo) d.lo = d2.lo, d.loFlagged = d2.loFlagged;
            if (sameEnd(d1.hi, d2.hi)) d.hiFlagged = d1.hiFlagged || d2.hiFlagged;
            else if (d2.hi < d1.hi) d.hi = d2.hi, d.hiFlagged = d2.hiFlagged;
            if (d1.chart == Chart::Sector) d.param = std::min(d1.param, d2.param);
            if (d.empty()) continue;
            out.push_back({d, PhiFunction{x.phi.body + y.phi.body}});
        }
    }
    return ExpSheaf(std::move(out));
}

bool expIso(const ExpSheaf& a, const ExpSheaf& b) {
    const auto& sa = a.summands();
    const auto& sb = b.summands();
    if (sa.size() != sb.size()) return false;
    std::vector<bool> used(sb.size(), false);
    for (const auto& x : sa) {
        bool found = false;
        for (std::size_t k = 0; k < sb.size() && !found; ++k) {
            if (used[k] || !(x.domain == sb[k].domain)) continue;
            if (differenceBounded(x.domain, x.phi.body - sb[k].phi.body)) {
                used[k] = true;
                found = true;
            }
        }
        if (!found) return false;
    }
    return true;
}

HomDimension homDim(const ExpSheaf& a, const ExpSheaf& b) {
    HomDimension h;
    if (a.isZero() || b.isZero()) {
        h.blocks.assign(a.summands().size(), std::vector<int>(b.summands().size(), 0));
        return h;
    }
    const BorderedDomain dom = a.summands().front().domain;
    for (const auto& s : a.summands())
        if (!(s.domain == dom)) throw DomainError("homDim needs all summands on one connected domain");
    for (const auto& s : b.summands())
        if (!(s.domain == dom)) throw DomainError("homDim needs all summands on one connected domain");
    for (const auto& x : a.summands()) {
        std::vector<int> row;
        for (const auto& y : b.summands()) {
            const int v = differenceBoundedAbove(dom, y.phi.body - x.phi.body) ? 1 : 0;
            row.push_back(v);
            h.total += v;
        }
        h.blocks.push_back(std::move(row));
    }
    return h;
}

// ---------------------------------------------------------------------------
// Stokes local systems

double StokesLocalSystem::period() const { return 2.0 * std::numbers::pi * static_cast<double>(ramification); }

ExpSheaf StokesLocalSystem::localModel(std::size_t i, double radius) const {
    const Sector& s = cover.at(i);
    std::vector<ExpSummand> out;
    for (const auto& f : factors)
        out.push_back({BorderedDomain{Chart::Sector, s.lo, s.hi, true, false, radius}, PhiFunction{f.body()}});
    return ExpSheaf(std::move(out));
}

ExpSheaf solT(const ExponentialFactor& f, const BorderedDomain& domain) { return ExpSheaf::single(domain, f.body()); }

ExpSheaf solT(const ExponentialFactor& f) {
    return solT(f, BorderedDomain{Chart::Sector, -std::numbers::pi, std::numbers::pi, true, false, 1.0});
}

StokesLocalSystem fromStokesSet(const StokesMatrixSet& s) {
    StokesLocalSystem k;
    k.factors = s.factors;
    k.ramification = s.ramification;
    k.cover = s.cover;
    k.transitions = s.matrices;
    k.formalMonodromy = s.formalMonodromy;
    k.localSystemRank = s.rank();
    return k;
}

StokesLocalSystem solT(const DiffOp& p, double R, int N) { return fromStokesSet(runStokesPipeline(p, R, N).stokes); }

ValidationReport validateSLS(const StokesLocalSystem& k, double tol) {
    ValidationReport rep;
    auto violate = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    const int m = k.rank();
    if (m < 1) violate("(a) no exponential factors");
    if (k.localSystemRank != m) violate("(a) local system rank differs from the number of factors");
    if (k.cover.empty()) violate("(a) empty cover");
    if (k.formalMonodromy.rows() != m || k.formalMonodromy.cols() != m) violate("(a) formal monodromy shape");
    for (std::size_t i = 0; i < k.cover.size(); ++i)
        if (static_cast<int>(k.localModel(i).summands().size()) != m)
            violate("(a) sector " + std::to_string(i) + ": local model is not a sum of the factor objects");
    if (!rep.valid) return rep;

    const auto ov = overlaps(k.cover, k.period());
    if (k.transitions.size() != ov.size()) {
        violate("(a) expected " + std::to_string(ov.size()) + " transitions, found " +
                std::to_string(k.transitions.size()));
        return rep;
    }
    for (std::size_t i = 0; i < ov.size(); ++i) {
        const Eigen::MatrixXcd& S = k.transitions[i];
        const std::string where = "overlap " + std::to_string(i);
        if (S.rows() != m || S.cols() != m) {
            violate("(b) " + where + ": wrong shape");
            continue;
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(S);
        lu.setThreshold(tol);
        if (!lu.isInvertible()) violate("(b) " + where + ": transition is singular");
        const DominancePattern pat = dominancePattern(k.factors, ov[i]);
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l)
                if (!pat.allowed[j][l] && std::abs(S(j, l)) > tol)
                    violate("(c) " + where + ": entry (" + std::to_string(j) + "," + std::to_string(l) +
                            ") violates dominance");
    }
    const double twoPi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < k.cover.size(); ++i) {
        const Sector& s = k.cover[i];
        if (s.determination != static_cast<int>(std::floor((s.center() + std::numbers::pi) / twoPi)))
            violate("(d) sector " + std::to_string(i) + ": determination does not match its position");
        if (i + 1 < k.cover.size() && !(k.cover[i + 1].lo < s.hi && s.center() < k.cover[i + 1].center()))
            violate("(d) sectors " + std::to_string(i) + " and " + std::to_string(i + 1) + " do not overlap in order");
    }
    if (k.cover.size() > 1) {
        if (!(k.cover.front().lo + k.period() < k.cover.back().hi))
            violate("(d) the cover does not close up under the deck shift");
    } else if (k.cover.front().width() > k.period() + 1e-12) {
        violate("(d) the single sector overlaps its own deck image");
    }
    return rep;
}

int slsHom(const StokesLocalSystem& k1, const StokesLocalSystem& k2, double tol) {
    const int m1 = k1.rank(), m2 = k2.rank();
    auto sameCover = [](const std::vector<Sector>& a, const std::vector<Sector>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!sameEnd(a[i].lo, b[i].lo) || !sameEnd(a[i].hi, b[i].hi)) return false;
        return true;
    };
    // Transitions on the common cover; a single-sector side is refined with identities.
    std::vector<Sector> cover;
    std::vector<Eigen::MatrixXcd> t1, t2;
    double period = 0.0;
    if (sameCover(k1.cover, k2.cover)) {
        cover = k1.cover;
        t1 = k1.transitions;
        t2 = k2.transitions;
        period = k1.period();
    } else if (k1.cover.size() == 1) {
        cover = k2.cover;
        t1.assign(k2.transitions.size(), Eigen::MatrixXcd::Identity(m1, m1));
        t2 = k2.transitions;
        period = k2.period();
    } else if (k2.cover.size() == 1) {
        cover = k1.cover;
        t1 = k1.transitions;
        t2.assign(k1.transitions.size(), Eigen::MatrixXcd::Identity(m2, m2));
        period = k1.period();
    } else {
        throw DomainError("slsHom needs identical covers or a single-sector side");
    }
    const std::size_t n = cover.size();
    if (n > 1 && (t1.size() != n || t2.size() != n)) throw DomainError("slsHom needs one transition per overlap");
    if (n == 1) {
        period = 2.0 * std::numbers::pi;
        t1 = {Eigen::MatrixXcd::Identity(m1, m1)};
        t2 = {Eigen::MatrixXcd::Identity(m2, m2)};
    }
    const int turns = static_cast<int>(std::lround(period / (2.0 * std::numbers::pi)));
    Eigen::MatrixXcd M1 = Eigen::MatrixXcd::Identity(m1, m1), M2 = Eigen::MatrixXcd::Identity(m2, m2);
    for (int t = 0; t < turns; ++t) {
        M1 = M1 * k1.formalMonodromy;
        M2 = M2 * k2.formalMonodromy;
    }
    const Eigen::MatrixXcd M2inv = M2.inverse();

    // Unknowns: allowed entries (j,l) of A_i, where Re g_l <= Re f_j + O(1) on sector i.
    struct Slot {
        std::size_t sector;
        int j, l;
    };
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < n; ++i) {
        const Sector& s = cover[i];
        for (int j = 0; j < m1; ++j)
            for (int l = 0; l < m2; ++l) {
                const PuiseuxSeries g = k2.factors[static_cast<std::size_t>(l)].body() -
                                        k1.factors[static_cast<std::size_t>(j)].body();
                if (asymptoticallyNonPositive(g, s.lo, s.hi)) slots.push_back({i, j, l});
            }
    }
    if (slots.empty()) return 0;

    // S1_i A_i - A_{i+1} S2_i = 0, with A_n = M1 A_0 M2^{-1}.
    const Eigen::Index rowsPerEq = static_cast<Eigen::Index>(m1) * m2;
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(rowsPerEq * static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(slots.size()));
    for (std::size_t c = 0; c < slots.size(); ++c) {
        const Slot& sl = slots[c];
        Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(m1, m2);
        E(sl.j, sl.l) = 1.0;
        // A_i appears in equation i (as S1_i A_i) and in equation i-1 (as -A_i S2_{i-1}).
        const Eigen::MatrixXcd own = t1[sl.sector] * E;
        Eigen::MatrixXcd prev;
        std::size_t prevEq;
        if (sl.sector == 0) {
            prev = -(M1 * E * M2inv) * t2[n - 1];
            prevEq = n - 1;
        } else {
            prev = -E * t2[sl.sector - 1];
            prevEq = sl.sector - 1;
        }
        for (int j = 0; j < m1; ++j)
            for (int l = 0; l < m2; ++l) {
                L(static_cast<Eigen::Index>(sl.sector) * rowsPerEq + j * m2 + l, static_cast<Eigen::Index>(c)) +=
                    own(j, l);
                L(static_cast<Eigen::Index>(prevEq) * rowsPerEq + j * m2 + l, static_cast<Eigen::Index>(c)) +=
                    prev(j, l);
            }
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(L);
    lu.setThreshold(tol);
    return static_cast<int>(slots.size()) - static_cast<int>(lu.rank());
}

DiffOp rankOneOperator(const ExponentialFactor& f) {
    // delta - delta f, cleared of denominators by z^{pole order}.
    const Rational q = f.poleOrder();
    const PuiseuxSeries df = f.body().delta();
    const DeltaForm d({(-df).shifted(q), PuiseuxSeries::monomial(1.0, q)});
    return fromDeltaForm(d);
}

}  // namespace rhlab
