#pragma once

// Ground-truth Lyapunov vector via the discrete QR method: orbits sampled
// from the invariant measure, an orthonormal frame renormalized at every
// step, log diagonal R entries accumulated and averaged.

#include "lyapopt/dynamics.hpp"

#include <cstdint>

namespace lyapopt {

struct LyapunovEstimate {
  LogSingularVector lambda;    // nats per iteration, nonincreasing
  std::int64_t n_steps = 0;
  int samples = 0;
  double per_point_spread = 0.0;  // max per-component deviation across samples
};

struct OracleConfig {
  std::int64_t n_steps = 10000;
  int samples = 64;
  std::uint64_t seed = 1;
  /// Frame-transient steps discarded before accumulation begins.
  std::int64_t burn_in = 1000;
};

/// Weight-averaged Lyapunov vector of the system. Per-sample orbits start
/// at points drawn from the measure; the reduction runs in sample-index
/// order, so results are seed-reproducible.
LyapunovEstimate lyapunov_vector(const TorusSystem& sys,
                                 const MeasureWeights& weights,
                                 const OracleConfig& config = {});

/// Average log-det growth rate (1/n) log|det df^n_x|; equals the sum of
/// the Lyapunov exponents.
double det_growth_check(const TorusSystem& sys, const MeasureWeights& weights,
                        const OracleConfig& config = {});

}  // namespace lyapopt
