#pragma once

#include "rhlab/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rhlab {

/// Angle on the universal cover of the circle of directions.
struct Direction {
    double theta = 0.0;
};

struct DirectionSet {
    std::vector<Direction> directions;  // sorted, in [0, period)
    bool trivial = false;               // all factors equal
    std::int64_t ramification = 1;

    double period() const;
};

/// Directions where the leading term of Re(f_j - f_k) vanishes, over [0, 2 pi d).
/// d is the lcm of `ramification` and the factor ramifications.
DirectionSet stokesDirections(const std::vector<ExponentialFactor>& factors, std::int64_t ramification = 1);

struct Sector {
    double lo = 0.0;
    double hi = 0.0;
    int determination = 0;  // branch of log z at the centre

    double center() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double theta) const { return lo <= theta && theta <= hi; }
};

/// One quarter of the smallest gap between consecutive directions.
double defaultOverlapHalfWidth(const DirectionSet& dirs);

/// Sectors centred on the directions, each reaching halfWidth past the midpoints to
/// its neighbours, listed cyclically from the sector containing theta = 0.
/// Throws DomainError when halfWidth is not below half of some gap.
std::vector<Sector> sectorCover(const DirectionSet& dirs, std::optional<double> halfWidth = std::nullopt);

/// Overlap of sector i with sector i+1; the last one wraps to sector 0 shifted by one period.
std::vector<Sector> overlaps(const std::vector<Sector>& cover, double period);

/// Sampled check that Re g(r e^{i theta}) <= 0 as r -> 0 for every theta in [lo, hi].
bool asymptoticallyNonPositive(const PuiseuxSeries& g, double lo, double hi, int samples = 257);

struct DominancePattern {
    std::vector<std::vector<bool>> allowed;
    Sector context;

    int size() const { return static_cast<int>(allowed.size()); }
    /// Rows separated by "/", e.g. "*0/**".
    std::string toString() const;
    bool operator==(const DominancePattern& o) const { return allowed == o.allowed; }
};

DominancePattern dominancePattern(const std::vector<ExponentialFactor>& factors, const Sector& overlap);

struct StokesMatrixSet {
    std::vector<Sector> cover;
    std::vector<Eigen::MatrixXcd> matrices;  // matrices[i]: sector i -> sector i+1
    Eigen::MatrixXcd formalMonodromy;
    std::int64_t ramification = 1;
    std::vector<ExponentialFactor> factors;  // per basis element
    std::vector<Complex> exponents;

    double period() const;
    int rank() const { return static_cast<int>(factors.size()); }
};

struct ValidationReport {
    bool valid = true;
    std::vector<std::string> violations;
};

ValidationReport validateStokesSet(const StokesMatrixSet& s, double tol = 1e-6);

/// (S_{n/d-1} ... S_0)^{-1} M: continuation once around the puncture in the sector-0 basis.
/// Throws DomainError for an invalid set.
Eigen::MatrixXcd monodromyFromStokes(const StokesMatrixSet& s, double tol = 1e-6);

}  // namespace rhlab
