#include "lyapopt/met_oracle.hpp"

#include "lyapopt/rng.hpp"

#include <algorithm>
#include <cmath>

namespace lyapopt {

namespace {

// Draws a point from the discretized measure: pick a cell by weight, then
// a uniform position inside it.
TorusPoint draw_point(const MeasureWeights& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t cell = weights.cell_count() - 1;
  for (std::size_t i = 0; i < weights.cell_count(); ++i) {
    acc += weights[i];
    if (u < acc) {
      cell = i;
      break;
    }
  }
  const int n = weights.resolution();
  const int d = weights.dim();
  Vector coords(d);
  std::size_t rem = cell;
  for (int i = d - 1; i >= 0; --i) {
    coords[i] = (static_cast<double>(rem % n) + rng.uniform()) / n;
    rem /= n;
  }
  return TorusPoint(std::move(coords));
}

// Gram-Schmidt QR with positive diagonal; d is tiny, so no pivoting.
void qr_step(const Matrix& m, Matrix& q, Vector& log_r_diag) {
  const int d = static_cast<int>(m.cols());
  Matrix w = m;
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) w.col(j) -= q.col(i).dot(w.col(j)) * q.col(i);
    const double norm = w.col(j).norm();
    log_r_diag[j] = std::log(norm);
    q.col(j) = w.col(j) / norm;
  }
}

}  // namespace

LyapunovEstimate lyapunov_vector(const TorusSystem& sys,
                                 const MeasureWeights& weights,
                                 const OracleConfig& config) {
  if (config.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (config.samples < 1) throw std::invalid_argument("samples must be >= 1");
  const int d = sys.dim();

  Rng rng(config.seed);
  std::vector<Vector> per_sample;
  per_sample.reserve(config.samples);

  for (int s = 0; s < config.samples; ++s) {
    TorusPoint x = draw_point(weights, rng);

    // Random orthonormal initial frame.
    Matrix frame(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) frame(i, j) = rng.uniform(-1.0, 1.0);
    Matrix q = Matrix::Identity(d, d);
    Vector scratch(d);
    qr_step(frame, q, scratch);

    for (std::int64_t k = 0; k < config.burn_in; ++k) {
      qr_step(sys.jacobian(x) * q, q, scratch);
      x = sys.apply(x);
    }

    Vector acc = Vector::Zero(d);
    for (std::int64_t k = 0; k < config.n_steps; ++k) {
      qr_step(sys.jacobian(x) * q, q, scratch);
      acc += scratch;
      x = sys.apply(x);
    }
    Vector lam = acc / static_cast<double>(config.n_steps);
    std::sort(lam.data(), lam.data() + d, std::greater<double>());
    per_sample.push_back(std::move(lam));
  }

  Vector mean = Vector::Zero(d);
  for (const Vector& v : per_sample) mean += v;
  mean /= static_cast<double>(per_sample.size());
  std::sort(mean.data(), mean.data() + d, std::greater<double>());

  double spread = 0.0;
  for (const Vector& v : per_sample)
    spread = std::max(spread, (v - mean).cwiseAbs().maxCoeff());

  LyapunovEstimate est{LogSingularVector(mean), config.n_steps,
                       config.samples, spread};
  return est;
}

double det_growth_check(const TorusSystem& sys, const MeasureWeights& weights,
                        const OracleConfig& config) {
  Rng rng(config.seed);
  double total = 0.0;
  for (int s = 0; s < config.samples; ++s) {
    TorusPoint x = draw_point(weights, rng);
    double acc = 0.0;
    for (std::int64_t k = 0; k < config.n_steps; ++k) {
      acc += std::log(std::abs(sys.jacobian(x).determinant()));
      x = sys.apply(x);
    }
    total += acc / static_cast<double>(config.n_steps);
  }
  return total / static_cast<double>(config.samples);
}

}  // namespace lyapopt
