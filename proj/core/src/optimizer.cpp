#include "lyapopt/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace lyapopt {

namespace {

// Exact per-cell projection onto the trace-free subspace at g.
void project_tracefree(const MetricField& g, std::vector<Matrix>& values) {
  const int d = g.dim();
  for (std::size_t c = 0; c < values.size(); ++c) {
    const double tr = (g[c].inverse() * values[c]).trace();
    values[c] -= (tr / d) * g[c];
  }
}

// Daleckii-Krein: the Frechet derivative of a spectral function at a
// symmetric matrix with eigensystem (V, lam) acts as a Hadamard multiplier
// by divided differences in the eigenbasis; it is self-adjoint, so the same
// application transports gradients backwards through the chain rule.
template <typename DD>
Matrix dk_apply(const Matrix& v, const Vector& lam, DD&& dd, const Matrix& w) {
  Matrix m = v.transpose() * spd::sym(w) * v;
  for (int i = 0; i < lam.size(); ++i)
    for (int j = 0; j < lam.size(); ++j) m(i, j) *= dd(lam[i], lam[j]);
  return v * m * v.transpose();
}

// Divided difference of exp(s/2); this is where the 1/2 factor of the
// projection-difference derivative formula comes from.
double dd_exp_half(double a, double b) {
  if (std::abs(a - b) < 1e-8 * (1.0 + std::max(std::abs(a), std::abs(b))))
    return 0.5 * std::exp(0.25 * (a + b));
  return (std::exp(0.5 * a) - std::exp(0.5 * b)) / (a - b);
}

// Divided difference of lam^{-1/2}, in cancellation-free form.
double dd_inv_sqrt(double a, double b) {
  const double ra = std::sqrt(a), rb = std::sqrt(b);
  return -1.0 / (ra * rb * (ra + rb));
}

// Divided difference of log.
double dd_log(double a, double b) {
  if (std::abs(a - b) < 1e-8 * std::max(a, b)) return 2.0 / (a + b);
  return (std::log(a) - std::log(b)) / (a - b);
}

}  // namespace

GradientField gradient_field(const TorusSystem& sys, const MetricField& g,
                             const MeasureWeights& weights, int k,
                             double gap_margin) {
  if (k < 1 || k > g.dim()) throw std::invalid_argument("k out of range");
  if (weights.resolution() != g.resolution() || weights.dim() != g.dim())
    throw DimensionMismatch("weights grid differs");
  const int d = g.dim();

  GradientField out;
  out.k = k;
  out.values.assign(g.cell_count(), Matrix::Zero(d, d));
  out.spectral_gap_ok.assign(g.cell_count(), true);

  // Cached eigensystems of the cell values (used by the log chain rule and
  // by the inverse square root at the sample cell).
  std::vector<Matrix> eigvec(g.cell_count());
  std::vector<Vector> eigval(g.cell_count());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g[c]);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw NotPositiveDefinite("cell Gram matrix not positive-definite");
    eigvec[c] = es.eigenvectors();
    eigval[c] = es.eigenvalues();
  }

  // Frobenius gradients of sum_x mu_x sigma-sum_k(B_x) with respect to each
  // cell value, with B_x = exp(S_fx / 2) A_x G_x^{-1/2} and
  // S_fx = sum_corners w_c log G_c (log-Euclidean interpolation).
  std::vector<Matrix> frob(g.cell_count(), Matrix::Zero(d, d));

  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const double w = weights[c];
    const TorusPoint x = g.sample_point(c);
    const TorusPoint fx = sys.apply(x);
    const auto corners = g.stencil(fx);

    Matrix s_fx = Matrix::Zero(d, d);
    for (const auto& [idx, cw] : corners)
      s_fx += cw * (eigvec[idx] *
                    eigval[idx].array().log().matrix().asDiagonal() *
                    eigvec[idx].transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es_s(spd::sym(s_fx));
    const Matrix p = es_s.eigenvectors() *
                     (es_s.eigenvalues() * 0.5).array().exp().matrix().asDiagonal() *
                     es_s.eigenvectors().transpose();
    const Matrix q = eigvec[c] *
                     eigval[c].array().rsqrt().matrix().asDiagonal() *
                     eigvec[c].transpose();
    const Matrix a = sys.jacobian(x);
    const Matrix b = p * a * q;

    const spd::SvdResult svd = spd::deterministic_svd(b);
    if (k < d && svd.sigma[k - 1] - svd.sigma[k] < gap_margin * svd.sigma[0])
      out.spectral_gap_ok[c] = false;

    if (w == 0.0) continue;
    // Fractional top-k weights: within a group of singular values tied at
    // the gap margin the top-k projector is averaged over the group (the
    // centered subgradient), so degenerate cells do not inject a spurious
    // direction. With a clean gap this is the plain rank-k selection.
    Vector fw = Vector::Zero(d);
    for (int i = 0; i < d;) {
      int j = i;
      while (j + 1 < d &&
             svd.sigma[j] - svd.sigma[j + 1] < gap_margin * svd.sigma[0])
        ++j;
      const double take = std::clamp(static_cast<double>(k - i), 0.0,
                                     static_cast<double>(j - i + 1));
      for (int m = i; m <= j; ++m) fw[m] = take / static_cast<double>(j - i + 1);
      i = j + 1;
    }
    // d sum_i fw_i log sigma_i = <T, dB> with T = U diag(fw_i / sigma_i) V^T.
    Vector tw(d);
    for (int i = 0; i < d; ++i) tw[i] = fw[i] / svd.sigma[i];
    const Matrix t = svd.u * tw.asDiagonal() * svd.v.transpose();

    // Left factor: through exp(S/2) and the interpolation logs.
    const Matrix w_p = t * q * a.transpose();
    const Matrix w_s = dk_apply(es_s.eigenvectors(), es_s.eigenvalues(),
                                dd_exp_half, w_p);
    for (const auto& [idx, cw] : corners)
      frob[idx] += (w * cw) * dk_apply(eigvec[idx], eigval[idx], dd_log, w_s);

    // Right factor: through G_x^{-1/2} at the sample cell itself.
    const Matrix w_q = a.transpose() * p * t;
    frob[c] += w * dk_apply(eigvec[c], eigval[c], dd_inv_sqrt, w_q);
  }

  // Convert Frobenius gradients into the density representation used by the
  // descent: d/dt = sum_c w_c <Gamma_c, h_c>_{g_c} with <a,b>_g =
  // tr(g^{-1} a g^{-1} b), hence Gamma_c = g_c F_c g_c / w_c.
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (weights[c] > 0.0)
      out.values[c] = spd::sym(g[c] * frob[c] * g[c]) / weights[c];
    else
      out.values[c].setZero();
  }
  return out;
}

OptimizationResult descend(const TorusSystem& sys, const MetricField& g0,
                           const MeasureWeights& weights,
                           const OptimizerConfig& config,
                           const LyapunovEstimate* oracle) {
  if (config.k_weights.size() != g0.dim())
    throw DimensionMismatch("scalarization weight count differs from dim");
  if (config.k_weights.minCoeff() < 0.0 || config.k_weights.sum() <= 0.0)
    throw std::invalid_argument("scalarization weights must be >= 0 with positive sum");

  const int d = g0.dim();
  MetricField g = g0;
  OptimizationResult result{g, {}, false, 0};
  double step = config.step_init;

  ObjectiveReport report = evaluate_objective(sys, g, weights, oracle);
  double value = config.k_weights.dot(report.s_partial);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    // Combined derivative over the active k's.
    std::vector<Matrix> combined(g.cell_count(), Matrix::Zero(d, d));
    for (int k = 1; k <= d; ++k) {
      const double wk = config.k_weights[k - 1];
      if (wk == 0.0) continue;
      GradientField gf = gradient_field(sys, g, weights, k, config.gap_margin);
      for (std::size_t c = 0; c < combined.size(); ++c)
        combined[c] += wk * gf.values[c];
    }
    project_tracefree(g, combined);
    TangentField grad(g.resolution(), d, std::move(combined));
    const double grad_norm = std::sqrt(l2_inner(g, grad, grad, weights));

    result.trace.push_back(
        {iter, report.s_partial, 0.0, grad_norm, report.gap_to_oracle});
    if (grad_norm < config.grad_tol) break;

    // Armijo backtracking along the geodesic in direction -grad.
    const TangentField direction = -grad;
    double t = step;
    bool accepted = false;
    while (t >= 1e-14) {
      MetricField trial = geodesic_step(g, direction, t);
      ObjectiveReport trial_report = evaluate_objective(sys, trial, weights, oracle);
      const double trial_value = config.k_weights.dot(trial_report.s_partial);
      if (trial_value <=
          value - config.armijo_c * t * grad_norm * grad_norm) {
        g = std::move(trial);
        report = std::move(trial_report);
        value = trial_value;
        accepted = true;
        break;
      }
      t *= config.armijo_shrink;
    }
    if (!accepted) {
      result.line_search_stalled = true;
      break;
    }
    result.trace.back().step = t;
    result.iterations = iter + 1;
    // Allow the step to grow again after a successful iteration.
    step = std::min(config.step_init, t / config.armijo_shrink);
  }

  result.field = std::move(g);
  return result;
}

double verify_gradient(const TorusSystem& sys, const MetricField& g,
                       const MeasureWeights& weights, int k, int n_directions,
                       double delta, std::uint64_t seed, double gap_margin) {
  GradientField gf = gradient_field(sys, g, weights, k, gap_margin);
  if (!gf.gap_ok_everywhere())
    throw SpectralGapViolated("singular-value gap hypothesis fails at a cell");

  TangentField gamma(g.resolution(), g.dim(), gf.values);
  Vector k_weights = Vector::Zero(g.dim());
  k_weights[k - 1] = 1.0;

  double worst = 0.0;
  for (int i = 0; i < n_directions; ++i) {
    TangentField h = random_tangent(g, weights, seed + i);
    // random_tangent is trace-free against g, so geodesic_step accepts it.
    const double analytic = l2_inner(g, gamma, h, weights);
    const double plus =
        scalarized_objective(sys, geodesic_step(g, h, delta), weights, k_weights);
    const double minus =
        scalarized_objective(sys, geodesic_step(g, h, -delta), weights, k_weights);
    const double fd = (plus - minus) / (2.0 * delta);
    const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-12});
    worst = std::max(worst, std::abs(analytic - fd) / scale);
  }
  return worst;
}

}  // namespace lyapopt
