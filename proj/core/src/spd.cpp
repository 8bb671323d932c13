#include "lyapopt/spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lyapopt {

LogSingularVector::LogSingularVector(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw DimensionMismatch("empty log-singular-value vector");
  for (int i = 0; i + 1 < values_.size(); ++i) {
    if (values_[i] < values_[i + 1] - 1e-10)
      throw std::invalid_argument("log singular values not nonincreasing");
  }
}

Vector LogSingularVector::partial_sums() const {
  Vector out(values_.size());
  double acc = 0.0;
  for (int i = 0; i < values_.size(); ++i) {
    acc += values_[i];
    out[i] = acc;
  }
  return out;
}

LogSingularVector LogSingularVector::operator+(const LogSingularVector& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("vector dims differ");
  return LogSingularVector(values_ + other.values_);
}

LogSingularVector LogSingularVector::operator*(double s) const {
  if (s < 0) throw std::invalid_argument("negative scaling leaves the cone");
  return LogSingularVector(values_ * s);
}

namespace spd {

void check_symmetric(const Matrix& m, double tol) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw NotPositiveDefinite("matrix not symmetric");
}

void check_spd(const Matrix& m, double tol) {
  check_symmetric(m, tol);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefinite("matrix not positive-definite");
}

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

namespace {

// Applies a scalar function to the eigenvalues of a symmetric matrix.
template <typename F>
Matrix sym_apply(const Matrix& m, F&& fn, bool require_positive) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
  Vector ev = es.eigenvalues();
  if (require_positive && ev.minCoeff() <= 0.0)
    throw NotPositiveDefinite("eigenvalue <= 0 where positivity is required");
  Vector mapped(ev.size());
  for (int i = 0; i < ev.size(); ++i) mapped[i] = fn(ev[i]);
  return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Matrix matrix_sqrt(const Matrix& p) {
  return sym_apply(p, [](double x) { return std::sqrt(x); }, true);
}

Matrix matrix_inv_sqrt(const Matrix& p) {
  return sym_apply(p, [](double x) { return 1.0 / std::sqrt(x); }, true);
}

Matrix matrix_log(const Matrix& p) {
  return sym_apply(p, [](double x) { return std::log(x); }, true);
}

Matrix matrix_exp(const Matrix& v) {
  return sym_apply(v, [](double x) { return std::exp(x); }, false);
}

LogSingularVector log_singular_values(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix not square");
  Eigen::JacobiSVD<Matrix> svd(m);
  Vector sv = svd.singularValues();  // nonincreasing by construction
  Vector out(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] <= 0.0) throw SingularMatrix("singular value underflowed to zero");
    out[i] = std::log(sv[i]);
  }
  return LogSingularVector(out);
}

bool majorize_leq(const LogSingularVector& xi, const LogSingularVector& eta,
                  bool weak, double tol) {
  if (xi.dim() != eta.dim()) throw DimensionMismatch("vector dims differ");
  const Vector sx = xi.partial_sums();
  const Vector se = eta.partial_sums();
  const int d = xi.dim();
  for (int k = 0; k + 1 < d; ++k) {
    if (sx[k] > se[k] + tol) return false;
  }
  if (weak) return sx[d - 1] <= se[d - 1] + tol;
  return std::abs(sx[d - 1] - se[d - 1]) <= tol;
}

namespace {

// Relative eigenvalue vector of p^{-1}q through Cholesky factors:
// eigenvalues of p^{-1}q are the squared singular values of L_p^{-1} L_q.
// The factored route keeps full relative accuracy even when p and q are
// severely ill-conditioned (iterated pullbacks reach cond ~ 1e12).
Vector relative_log_eigs(const Matrix& p, const Matrix& q) {
  Eigen::LLT<Matrix> lp(sym(p)), lq(sym(q));
  if (lp.info() != Eigen::Success || lq.info() != Eigen::Success)
    throw NotPositiveDefinite("Cholesky failed: matrix not positive-definite");
  const Matrix c = lp.matrixL().solve(Matrix(lq.matrixL()));
  Eigen::JacobiSVD<Matrix> svd(c);
  Vector out(c.rows());
  for (int i = 0; i < out.size(); ++i) out[i] = 2.0 * std::log(svd.singularValues()[i]);
  return out;
}

// U diag(f(2 log sigma)) U^T for M = p^{-1/2} q p^{-1/2} = C C^T with
// C = p^{-1/2} L_q; eigenvectors of M are the left singular vectors of C.
template <typename F>
Matrix relative_eig_apply(const Matrix& p_inv_sqrt, const Matrix& q, F&& fn) {
  Eigen::LLT<Matrix> lq(sym(q));
  if (lq.info() != Eigen::Success)
    throw NotPositiveDefinite("Cholesky failed: matrix not positive-definite");
  const Matrix c = p_inv_sqrt * Matrix(lq.matrixL());
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU);
  Vector mapped(c.rows());
  for (int i = 0; i < mapped.size(); ++i)
    mapped[i] = fn(2.0 * std::log(svd.singularValues()[i]));
  return svd.matrixU() * mapped.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

double distance(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows()) throw DimensionMismatch("matrix dims differ");
  return relative_log_eigs(p, q).norm();
}

Matrix geodesic(const Matrix& p, const Matrix& q, double t) {
  if (p.rows() != q.rows()) throw DimensionMismatch("matrix dims differ");
  const Matrix r = matrix_sqrt(p);
  const Matrix inner = relative_eig_apply(
      matrix_inv_sqrt(p), q, [t](double lg) { return std::exp(t * lg); });
  return sym(r * inner * r);
}

Matrix geodesic_from(const Matrix& p, const Matrix& v, double t) {
  if (p.rows() != v.rows()) throw DimensionMismatch("matrix dims differ");
  check_symmetric(v);
  const Matrix r = matrix_sqrt(p);
  const Matrix w = matrix_inv_sqrt(p);
  return sym(r * matrix_exp(t * sym(w * v * w)) * r);
}

Matrix gl_action(const Matrix& g, const Matrix& p) {
  if (g.rows() != p.rows()) throw DimensionMismatch("matrix dims differ");
  return sym(g * p * g.transpose());
}

LogSingularVector vectorial_distance(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows()) throw DimensionMismatch("matrix dims differ");
  // 2 log sigma(p^{-1/2} q^{1/2}) = log eig(p^{-1} q), computed via Cholesky
  // factors; relative_log_eigs already returns the values nonincreasing.
  return LogSingularVector(relative_log_eigs(p, q));
}

Matrix riemannian_log(const Matrix& p, const Matrix& q) {
  const Matrix r = matrix_sqrt(p);
  const Matrix lg = relative_eig_apply(matrix_inv_sqrt(p), q,
                                       [](double lgv) { return lgv; });
  return sym(r * lg * r);
}

SvdResult deterministic_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  const int d = static_cast<int>(r.sigma.size());

  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (r.sigma[a] != r.sigma[b]) return r.sigma[a] > r.sigma[b];
    // Tie: lexicographic order of the sign-fixed left singular vectors.
    Vector ua = r.u.col(a), ub = r.u.col(b);
    for (int i = 0; i < d; ++i) {
      if (ua[i] != 0.0) { if (ua[i] < 0) ua = -ua; break; }
    }
    for (int i = 0; i < d; ++i) {
      if (ub[i] != 0.0) { if (ub[i] < 0) ub = -ub; break; }
    }
    for (int i = 0; i < d; ++i)
      if (ua[i] != ub[i]) return ua[i] < ub[i];
    return false;
  });

  SvdResult out{Matrix(d, d), Vector(d), Matrix(d, d)};
  for (int j = 0; j < d; ++j) {
    Vector uc = r.u.col(order[j]);
    Vector vc = r.v.col(order[j]);
    for (int i = 0; i < d; ++i) {
      if (uc[i] != 0.0) {
        if (uc[i] < 0) { uc = -uc; vc = -vc; }
        break;
      }
    }
    out.u.col(j) = uc;
    out.v.col(j) = vc;
    out.sigma[j] = r.sigma[order[j]];
  }
  return out;
}

Matrix barycenter(std::span<const Matrix> points, const ToleranceProfile& tol) {
  if (points.empty()) throw std::invalid_argument("barycenter of empty list");
  const Eigen::Index d = points[0].rows();
  for (const Matrix& p : points)
    if (p.rows() != d || p.cols() != d) throw DimensionMismatch("matrix dims differ");
  if (points.size() == 1) return points[0];

  Matrix mean = Matrix::Zero(d, d);
  for (const Matrix& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  const double l = static_cast<double>(points.size());

  // Gradient state at the current mean: logs accumulated in the mean's frame
  // (acc), principal square root (r), and the residual norms. The embedded
  // residual ||r acc r|| drives the stopping rule; the frame-invariant
  // intrinsic residual ||acc|| drives step control.
  struct State {
    Matrix mean, r, acc;
    double embedded, intrinsic;
  };
  auto gradient_state = [&](Matrix m) {
    State s;
    s.r = matrix_sqrt(m);
    const Matrix w = matrix_inv_sqrt(m);
    s.acc = Matrix::Zero(d, d);
    for (const Matrix& p : points)
      s.acc += relative_eig_apply(w, p, [](double lg) { return lg; });
    s.intrinsic = s.acc.norm();
    s.embedded = sym(s.r * s.acc * s.r).norm();
    s.mean = std::move(m);
    return s;
  };

  // Damped fixed-point iteration: the unit step is only locally convergent,
  // so halve the step whenever the residual fails to decrease and let it
  // regrow after each accepted move.
  State cur = gradient_state(std::move(mean));
  double step = 1.0;
  double best_embedded = std::numeric_limits<double>::infinity();
  Matrix best = cur.mean;
  int stalled = 0;
  for (int iter = 0; iter < tol.barycenter_max_iters; ++iter) {
    if (cur.embedded <= tol.barycenter_grad * l) return cur.mean;
    if (cur.embedded < best_embedded * (1.0 - 1e-3)) {
      best_embedded = cur.embedded;
      best = cur.mean;
      stalled = 0;
    } else if (++stalled >= 10) {
      // With severely ill-conditioned inputs the gradient bottoms out at the
      // float noise floor before the nominal tolerance; accept the best
      // iterate if it is close enough.
      if (best_embedded <= 1e-6 * l) return best;
      throw NoConvergence("Karcher iteration stalled above tolerance");
    }
    State cand = gradient_state(sym(cur.r * matrix_exp(step / l * cur.acc) * cur.r));
    if (cand.intrinsic < cur.intrinsic || step < 1e-4) {
      cur = std::move(cand);
      step = std::min(1.0, 2.0 * step);
    } else {
      step *= 0.5;
    }
  }
  if (best_embedded <= 1e-6 * l) return best;
  throw NoConvergence("Karcher iteration did not reach tolerance");
}

Matrix barycenter(const std::vector<Matrix>& points, const ToleranceProfile& tol) {
  return barycenter(std::span<const Matrix>(points.data(), points.size()), tol);
}

}  // namespace spd
}  // namespace lyapopt
