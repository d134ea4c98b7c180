#pragma once

#include "rhlab/diffop.hpp"
#include "rhlab/hlt.hpp"
#include "rhlab/stokes_geometry.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rhlab {

/// How a state vector is stored: (u, u', ..., u^(m-1)) or (u, delta u, ..., delta^(m-1) u).
enum class StateKind { Derivative, Delta };

/// Solution state at one point, stored as mantissa * exp(logScale).
struct RaySample {
    double radius = 0.0;
    double theta = 0.0;
    std::vector<Complex> state;
    double logScale = 0.0;

    Complex logPoint() const;
    /// log of the solution value (principal imaginary part).
    Complex logValue() const { return std::log(state.at(0)) + logScale; }
};

struct RaySolution {
    Direction direction;
    StateKind kind = StateKind::Derivative;
    std::vector<RaySample> samples;  // ascending radius
    int matchedIndex = -1;
    double matchRadius = 0.0;
};

/// Integrates p along z = r e^{i theta} from r0 to r1 starting from `init`
/// (scaled by exp(initLogScale)); samples are geometrically spaced, or
/// linearly spaced when one end is 0.
/// Throws PipelineError on a coefficient singularity or step-size underflow.
RaySolution integrateRay(const DiffOp& p, Direction dir, double r0, double r1, const std::vector<Complex>& init,
                         int samples = 33, StateKind kind = StateKind::Derivative, double initLogScale = 0.0);

/// Same integration along the arc |z| = r from theta0 to theta1; returns the final state.
RaySample integrateArc(const DiffOp& p, double r, double theta0, double theta1, const RaySample& start,
                       StateKind kind = StateKind::Delta);

/// Largest matching radius in the analysis coordinate (1/12, i.e. |z| = 12 for operators moved to infinity).
inline constexpr double kDefaultMatchRadius = 1.0 / 12.0;
inline constexpr int kDefaultMatchOrder = 20;

/// kDefaultMatchRadius, reduced until |c| R^{-k} >= 40 for every leading factor difference c z^{-k}.
/// Radius arguments below are replaced by this value when they are not positive.
double defaultMatchRadius(const HltDatum& h);

/// Radius beyond which every pair of distinct factors has comparable size:
/// max over pairs of |c|^{1/k} for leading difference c z^{-k}, and at least R.
double comparisonRadius(const HltDatum& h, double R);

/// Asymptotic basis on a sector: each solution seeded from the truncated formal
/// solution at radius R on the central direction (delta-state samples).
std::vector<RaySolution> matchAsymptotic(const DiffOp& p, const HltDatum& h, const Sector& sector, double R,
                                         int N = kDefaultMatchOrder);

/// Transition matrices between consecutive sectors of the cover, with the formal monodromy of h.
StokesMatrixSet computeStokesMatrices(const DiffOp& p, const HltDatum& h, const std::vector<Sector>& cover,
                                      double R = 0.0, int N = kDefaultMatchOrder);

/// Monodromy of the sector-0 basis obtained by continuing it numerically once around the puncture.
Eigen::MatrixXcd integratedMonodromy(const DiffOp& p, const HltDatum& h, const std::vector<Sector>& cover,
                                     double R = 0.0, int N = kDefaultMatchOrder);

/// hlt, stokesgeo and numint chained on an operator in its analysis coordinate.
struct StokesPipeline {
    HltDatum hlt;
    DirectionSet directions;
    std::vector<Sector> cover;
    StokesMatrixSet stokes;
    double matchRadius = 0.0;
    int matchOrder = 0;
};

/// R <= 0 selects defaultMatchRadius; halfWidth <= 0 the default overlap half-width.
/// With numeric = false the Stokes matrices are left empty.
StokesPipeline runStokesPipeline(const DiffOp& p, double R = 0.0, int N = kDefaultMatchOrder,
                                 double halfWidth = 0.0, bool numeric = true);

enum class EstimateVerdict { Pass, Fail, Inconclusive };

struct EstimateReport {
    EstimateVerdict verdict = EstimateVerdict::Inconclusive;
    double slope = 0.0;     // fitted d log(|u - u^N| e^{-Re f}) / d log r
    double expected = 0.0;  // Re lambda + N/d
    double decades = 0.0;   // radius range of the samples used
    int samplesUsed = 0;
    bool exact = false;     // every sample at the rounding floor
    std::string message;
};

std::string toString(EstimateVerdict v);

/// Fits the decay exponent of u - u_j^N toward the singular point.
EstimateReport estimateCheck(const RaySolution& u, const HltDatum& h, int j, int N);

}  // namespace rhlab
