#pragma once

#include "rhlab/diffop.hpp"
#include "rhlab/series.hpp"
#include "rhlab/stokes_geometry.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace rhlab {

/// Charts on which a phi function is written.
///   Real:    phi(x) = Re sum c_e x^e on a real interval (integer exponents off x > 0)
///   Radial:  phi(r) = Re f(r e^{i theta}) for r in the interval
///   Angular: phi(theta) = Re f(R e^{i theta}) for theta in the interval
///   Sector:  phi(r, theta) = Re f(r e^{i theta}), theta in the interval, 0 < r < R
enum class Chart { Real, Radial, Angular, Sector };

/// Open interval (lo, hi) of a chart coordinate; only flagged endpoints are
/// boundary points of the bordered space. For Sector charts the interval is the
/// arc and loFlagged marks the puncture r -> 0.
struct BorderedDomain {
    Chart chart = Chart::Real;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool loFlagged = false;
    bool hiFlagged = false;
    double param = 0.0;  // theta for Radial, R for Angular and Sector

    bool empty() const { return !(lo < hi); }
    bool operator==(const BorderedDomain& o) const;
    std::string toString() const;
};

struct PhiFunction {
    PuiseuxSeries body;  // exact series; phi is its real part on the chart

    double evaluate(const BorderedDomain& dom, double x, double theta = 0.0) const;
    std::string toString() const;
};

struct ExpSummand {
    BorderedDomain domain;
    PhiFunction phi;
};

/// Finite sum of exponential objects E_U^phi, kept sorted.
class ExpSheaf {
public:
    ExpSheaf() = default;
    explicit ExpSheaf(std::vector<ExpSummand> summands);
    static ExpSheaf single(const BorderedDomain& dom, const PuiseuxSeries& phi);

    const std::vector<ExpSummand>& summands() const { return summands_; }
    bool isZero() const { return summands_.empty(); }
    std::string toString() const;

private:
    std::vector<ExpSummand> summands_;
};

/// R \ {0} inside R, with the origin flagged: two components.
ExpSheaf punctured(const PuiseuxSeries& phi);

/// Whether phi(a) - phi(b) stays bounded (or bounded above) at the flagged endpoints,
/// decided from the exponents.
bool differenceBounded(const BorderedDomain& dom, const PuiseuxSeries& g);
bool differenceBoundedAbove(const BorderedDomain& dom, const PuiseuxSeries& g);

/// The same questions answered by sampling 1000 geometric points toward each flagged endpoint.
bool sampledBounded(const BorderedDomain& dom, const PuiseuxSeries& g, bool aboveOnly = false);

/// Summand-wise convolution; domains intersect and phis add. Throws DomainError on incompatible charts.
ExpSheaf convolve(const ExpSheaf& a, const ExpSheaf& b);

/// Same summand count and, after sorting, equal domains with bounded phi differences.
bool expIso(const ExpSheaf& a, const ExpSheaf& b);

struct HomDimension {
    std::vector<std::vector<int>> blocks;  // (j of a, k of b)
    int total = 0;
};

/// Dimension 1 per pair when phi_k <= phi_j + O(1). Summands must share one domain.
HomDimension homDim(const ExpSheaf& a, const ExpSheaf& b);

struct StokesLocalSystem {
    std::vector<ExponentialFactor> factors;
    std::int64_t ramification = 1;
    std::vector<Sector> cover;
    std::vector<Eigen::MatrixXcd> transitions;
    Eigen::MatrixXcd formalMonodromy;
    int localSystemRank = 0;

    int rank() const { return static_cast<int>(factors.size()); }
    double period() const;
    /// Summands on sector i: sum_j E^{Re f_j}.
    ExpSheaf localModel(std::size_t i, double radius = 1.0) const;
};

/// Rank-1 object E^{Re f} on a sector (default: the full circle, puncture flagged).
ExpSheaf solT(const ExponentialFactor& f, const BorderedDomain& domain);
ExpSheaf solT(const ExponentialFactor& f);

/// Full pipeline on an operator in its analysis coordinate.
StokesLocalSystem solT(const DiffOp& p, double R = 0.0, int N = 20);

StokesLocalSystem fromStokesSet(const StokesMatrixSet& s);

ValidationReport validateSLS(const StokesLocalSystem& k, double tol = 1e-6);

/// Dimension of the morphism families commuting with all transitions.
/// Covers must agree, or one side must be a single sector. Throws DomainError otherwise.
int slsHom(const StokesLocalSystem& k1, const StokesLocalSystem& k2, double tol = 1e-8);

/// Rank-1 operator z^{k+1} D + k c with solution exp(c z^{-k}); the zero factor gives z D.
DiffOp rankOneOperator(const ExponentialFactor& f);

}  // namespace rhlab
