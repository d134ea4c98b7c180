#pragma once

#include "rhlab/diffop.hpp"
#include "rhlab/series.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rhlab {

struct NewtonEdge {
    Rational slope;        // >= 0
    int length = 0;        // horizontal length
    int startIndex = 0;    // delta-power at the left end
    Rational startOrdinate;
};

/// Newton polygon of the delta-form: lower boundary of the union of the
/// quadrants {x <= k, y >= ord b_k}.
struct NewtonPolygon {
    std::vector<std::pair<int, Rational>> points;  // (k, ord b_k) for nonzero b_k
    std::vector<std::pair<int, Rational>> hull;    // vertices left to right
    std::vector<NewtonEdge> edges;                 // slopes strictly increasing

    std::vector<std::pair<Rational, int>> slopes() const;
    bool onlySlopeZero() const;
};

NewtonPolygon newtonPolygon(const DeltaForm& d);
NewtonPolygon newtonPolygon(const DiffOp& p);

struct FactorMultiplicity {
    ExponentialFactor factor;
    int multiplicity = 0;
    /// Set when the characteristic equation had roots merged within the clustering tolerance.
    bool illConditioned = false;
};

inline constexpr int kDefaultFactorDepth = 16;
inline constexpr int kDefaultTruncation = 20;

/// Exponential factors with multiplicities, sorted (most singular, largest real part first).
/// Throws PipelineError when the slope recursion exceeds maxDepth.
std::vector<FactorMultiplicity> exponentialFactors(const DiffOp& p, int maxDepth = kDefaultFactorDepth);

/// z^lambda e^{f} sum_k a_k(z) (log z)^k with each a_k a power series in z^{1/d} truncated after N/d.
struct FormalSolution {
    ExponentialFactor factor;
    Complex exponent;          // lambda
    int leadingLogPower = 0;   // the solution starts as z^lambda (log z)^leadingLogPower
    int logDepth = 0;          // highest log power present
    std::vector<PuiseuxSeries> series;  // index = log power
    int truncation = 0;        // N
    std::int64_t ramification = 1;

    /// The same solution with every series cut after exponent N/d.
    FormalSolution truncated(int n) const;

    /// Value and the first `derivatives` derivatives at exp(logPoint) as
    /// mantissa * exp(logScale); the determination is fixed by logPoint.
    /// With useDelta the derivatives are powers of z d/dz instead of d/dz.
    std::vector<Complex> evaluate(Complex logPoint, int derivatives, double& logScale, bool useDelta = false) const;
};

struct HltDatum {
    std::vector<FormalSolution> solutions;
    std::int64_t ramification = 1;
    std::vector<std::vector<int>> galoisOrbits;
    std::vector<FactorMultiplicity> factors;
    std::vector<std::string> warnings;
    int truncation = 0;

    int rank() const { return static_cast<int>(solutions.size()); }
};

/// Formal solutions at z = 0 truncated at N units of 1/d (N >= 1).
HltDatum formalSolutions(const DiffOp& p, int n = kDefaultTruncation, int maxDepth = kDefaultFactorDepth);

/// Maximal Newton slope; zero for Fuchsian operators.
Rational irregularity(const DiffOp& p);

/// M with u_j(z e^{2 pi i}) = sum_k M(j,k) u_k(z) for the formal basis: the deck
/// action on determinations followed by the exponent and logarithm twist.
Eigen::MatrixXcd formalMonodromy(const HltDatum& h);

}  // namespace rhlab
