#pragma once

// The vector objective: measure-averaged log singular value vectors of the
// one-step Jacobian under a metric field, its partial-sum components, and
// the convexity / Lipschitz / scaling-invariance checks they satisfy.

#include "lyapopt/met_oracle.hpp"
#include "lyapopt/metric_field.hpp"

#include <optional>

namespace lyapopt {

struct NoPositiveExponents : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ObjectiveReport {
  LogSingularVector svec;   // measure-averaged sigma vector
  Vector s_partial;         // prefix sums s_1..s_d
  Vector gap_to_oracle;     // s_k - oracle partial sums; zero if no oracle
  bool has_oracle = false;
  std::vector<Vector> per_cell_sigma;  // optional, empty unless requested
};

/// Log singular values of df_x under the metric field:
/// sigma(G_{fx}^{1/2} A_x G_x^{-1/2}).
LogSingularVector sigma_at(const TorusSystem& sys, const MetricField& g,
                           const TorusPoint& x);

ObjectiveReport evaluate_objective(const TorusSystem& sys, const MetricField& g,
                                   const MeasureWeights& weights,
                                   const LyapunovEstimate* oracle = nullptr,
                                   bool keep_per_cell = false);

/// Scalarized objective sum_k w_k s_k for the given nonnegative weights.
double scalarized_objective(const TorusSystem& sys, const MetricField& g,
                            const MeasureWeights& weights,
                            const Vector& k_weights);

/// Max_k |s_k(gamma * g) - s_k(g)| for a positive per-cell scalar field
/// gamma. Scalar scaling leaves the det-1 space, so the scaled objective
/// is computed directly from the scaled Gram matrices.
double scaling_invariance_check(const TorusSystem& sys, const MetricField& g,
                                const MeasureWeights& weights,
                                const std::vector<double>& gamma);

/// Per-cell and integrated midpoint cone-convexity:
/// sigma^{mid}(df_x) majorized by the average of the endpoint sigmas.
bool midpoint_convexity_check(const TorusSystem& sys, const MetricField& g_a,
                              const MetricField& g_b,
                              const MeasureWeights& weights, double tol = 1e-8);

struct LipschitzCheck {
  double lhs;  // |s_k(g1) - s_k(g2)|
  double rhs;  // sqrt(k) * weighted L2 distance
};
LipschitzCheck lipschitz_check(const TorusSystem& sys, const MetricField& g1,
                               const MetricField& g2,
                               const MeasureWeights& weights, int k);

/// s_k(g) for k = number of positive oracle exponents; an upper bound on
/// the measure-theoretic entropy. Returns 0 when no exponent is positive.
double entropy_estimate(const TorusSystem& sys, const MetricField& g,
                        const MeasureWeights& weights,
                        const LyapunovEstimate& oracle,
                        double positive_threshold = 1e-6);

}  // namespace lyapopt
