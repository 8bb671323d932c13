#include "lyapopt/objective.hpp"

#include <algorithm>
#include <cmath>

namespace lyapopt {

namespace {

Vector sigma_values(const TorusSystem& sys, const MetricField& g,
                    const TorusPoint& x) {
  const Matrix gx = g.evaluate(x);
  const Matrix gfx = g.evaluate(sys.apply(x));
  const Matrix b =
      spd::matrix_sqrt(gfx) * sys.jacobian(x) * spd::matrix_inv_sqrt(gx);
  return spd::log_singular_values(b).values();
}

}  // namespace

LogSingularVector sigma_at(const TorusSystem& sys, const MetricField& g,
                           const TorusPoint& x) {
  return LogSingularVector(sigma_values(sys, g, x));
}

ObjectiveReport evaluate_objective(const TorusSystem& sys, const MetricField& g,
                                   const MeasureWeights& weights,
                                   const LyapunovEstimate* oracle,
                                   bool keep_per_cell) {
  if (weights.resolution() != g.resolution() || weights.dim() != g.dim())
    throw DimensionMismatch("weights grid differs");
  const int d = g.dim();
  Vector svec = Vector::Zero(d);
  std::vector<Vector> per_cell;
  if (keep_per_cell) per_cell.reserve(g.cell_count());

  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Vector sig = sigma_values(sys, g, g.sample_point(c));
    svec += weights[c] * sig;
    if (keep_per_cell) per_cell.push_back(sig);
  }

  LogSingularVector avg(svec);
  ObjectiveReport report{avg, avg.partial_sums(), Vector::Zero(d), false,
                         std::move(per_cell)};
  if (oracle) {
    report.gap_to_oracle = report.s_partial - oracle->lambda.partial_sums();
    report.has_oracle = true;
  }
  return report;
}

double scalarized_objective(const TorusSystem& sys, const MetricField& g,
                            const MeasureWeights& weights,
                            const Vector& k_weights) {
  if (k_weights.size() != g.dim())
    throw DimensionMismatch("scalarization weight count differs from dim");
  const ObjectiveReport r = evaluate_objective(sys, g, weights);
  return k_weights.dot(r.s_partial);
}

double scaling_invariance_check(const TorusSystem& sys, const MetricField& g,
                                const MeasureWeights& weights,
                                const std::vector<double>& gamma) {
  if (gamma.size() != g.cell_count())
    throw DimensionMismatch("gamma cell count differs");
  for (double gm : gamma)
    if (gm <= 0.0) throw std::invalid_argument("gamma must be positive");

  // Log-Euclidean interpolation of gamma * g factors: the scalar part
  // interpolates as exp of the weighted log, independently of g. The
  // scaled sigma vector is sigma(B) + (1/2) log(gamma_fx / gamma_x) * ones.
  auto log_gamma_at = [&](const TorusPoint& x) {
    const int n = g.resolution();
    const int d = g.dim();
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int i = 0; i < d; ++i) {
      double u = x[i] * n - g.sample_offset();
      u -= std::floor(u / n) * n;
      int b = static_cast<int>(std::floor(u));
      double fr = u - b;
      if (fr < 1e-9) fr = 0.0;
      if (fr > 1.0 - 1e-9) {
        fr = 0.0;
        b = (b + 1) % n;
      }
      base[i] = b % n;
      frac[i] = fr;
    }
    double acc = 0.0;
    for (int c = 0; c < (1 << d); ++c) {
      double w = 1.0;
      std::size_t idx = 0;
      for (int i = 0; i < d; ++i) {
        const int bit = (c >> i) & 1;
        w *= bit ? frac[i] : 1.0 - frac[i];
        idx = idx * n + static_cast<std::size_t>((base[i] + bit) % n);
      }
      acc += w * std::log(gamma[idx]);
    }
    return acc;
  };

  const int d = g.dim();
  Vector base = Vector::Zero(d);
  Vector scaled = Vector::Zero(d);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const TorusPoint x = g.sample_point(c);
    const Vector sig = sigma_values(sys, g, x);
    base += weights[c] * sig;
    const double shift =
        0.5 * (log_gamma_at(sys.apply(x)) - log_gamma_at(x));
    scaled += weights[c] * (sig.array() + shift).matrix();
  }

  double worst = 0.0;
  double sb = 0.0, ss = 0.0;
  for (int k = 0; k < d; ++k) {
    sb += base[k];
    ss += scaled[k];
    worst = std::max(worst, std::abs(ss - sb));
  }
  return worst;
}

bool midpoint_convexity_check(const TorusSystem& sys, const MetricField& g_a,
                              const MetricField& g_b,
                              const MeasureWeights& weights, double tol) {
  if (!g_a.same_grid(g_b)) throw DimensionMismatch("field grids differ");

  // The paper's inequality is a pointwise matrix fact about the Gram values
  // at x and f(x), so the midpoint is taken after interpolation; taking it
  // before (interpolating a midpoint field) differs at second order because
  // log-Euclidean interpolation does not commute with geodesic midpoints.
  const int d = g_a.dim();
  Vector int_mid = Vector::Zero(d), int_avg = Vector::Zero(d);
  for (std::size_t c = 0; c < g_a.cell_count(); ++c) {
    const TorusPoint x = g_a.sample_point(c);
    const TorusPoint fx = sys.apply(x);
    const Matrix a = sys.jacobian(x);
    const Matrix mid_x = spd::geodesic(g_a[c], g_b[c], 0.5);
    const Matrix mid_fx =
        spd::geodesic(g_a.evaluate(fx), g_b.evaluate(fx), 0.5);
    const Vector sm =
        spd::log_singular_values(spd::matrix_sqrt(mid_fx) * a *
                                 spd::matrix_inv_sqrt(mid_x))
            .values();
    const Vector sa = sigma_values(sys, g_a, x);
    const Vector sb = sigma_values(sys, g_b, x);
    const Vector avg = 0.5 * (sa + sb);
    if (!spd::majorize_leq(LogSingularVector(sm), LogSingularVector(avg),
                           /*weak=*/false, tol))
      return false;
    int_mid += weights[c] * sm;
    int_avg += weights[c] * avg;
  }
  return spd::majorize_leq(LogSingularVector(int_mid),
                           LogSingularVector(int_avg), /*weak=*/false, tol);
}

LipschitzCheck lipschitz_check(const TorusSystem& sys, const MetricField& g1,
                               const MetricField& g2,
                               const MeasureWeights& weights, int k) {
  if (k < 1 || k > g1.dim()) throw std::invalid_argument("k out of range");
  const ObjectiveReport r1 = evaluate_objective(sys, g1, weights);
  const ObjectiveReport r2 = evaluate_objective(sys, g2, weights);
  const double lhs = std::abs(r1.s_partial[k - 1] - r2.s_partial[k - 1]);
  const double rhs = std::sqrt(static_cast<double>(k)) *
                     l2_distance(g1, g2, weights);
  return {lhs, rhs};
}

double entropy_estimate(const TorusSystem& sys, const MetricField& g,
                        const MeasureWeights& weights,
                        const LyapunovEstimate& oracle,
                        double positive_threshold) {
  int k = 0;
  for (int i = 0; i < oracle.lambda.dim(); ++i)
    if (oracle.lambda[i] > positive_threshold) ++k;
  if (k == 0) return 0.0;
  const ObjectiveReport r = evaluate_objective(sys, g, weights);
  return r.s_partial[k - 1];
}

}  // namespace lyapopt
