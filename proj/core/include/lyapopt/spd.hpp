#pragma once

// Numerical geometry of the cone of symmetric positive-definite matrices:
// log singular value vectors, the trace-metric distance, geodesics, the
// congruence action of GL(d), the vectorial distance, the majorization
// order and the Karcher barycenter. All matrices are small and dense;
// every primitive goes through a symmetric eigendecomposition.

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

namespace lyapopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotPositiveDefinite : std::domain_error {
  using std::domain_error::domain_error;
};
struct SingularMatrix : std::domain_error {
  using std::domain_error::domain_error;
};
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Absolute/relative tolerances shared across the library. Defaults are
/// the values used by the test suites; callers may tighten or loosen.
struct ToleranceProfile {
  double symmetry = 1e-12;       // relative symmetry defect
  double nonincreasing = 1e-10;  // slack for sorted log singular values
  double majorize = 1e-9;        // absolute slack in partial-sum comparisons
  double det_one = 1e-10;        // |det - 1| for volume-normalized fields
  double tangency = 1e-8;        // |tr(g^{-1}h)| for tangent fields
  double barycenter_grad = 1e-10;  // per-point Karcher gradient norm
  int barycenter_max_iters = 200;
};

/// Nonincreasing vector of log singular values; element of the closed
/// cone {xi_1 >= ... >= xi_d}.
class LogSingularVector {
 public:
  explicit LogSingularVector(Vector values);

  int dim() const { return static_cast<int>(values_.size()); }
  const Vector& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }

  /// Prefix sums xi_1 + ... + xi_k for k = 1..d.
  Vector partial_sums() const;

  LogSingularVector operator+(const LogSingularVector& other) const;
  LogSingularVector operator*(double s) const;

 private:
  Vector values_;
};

namespace spd {

void check_symmetric(const Matrix& m, double tol = 1e-12);
void check_spd(const Matrix& m, double tol = 1e-12);

/// Symmetrize (m + m^T)/2. Used to scrub float drift before
/// eigendecompositions.
Matrix sym(const Matrix& m);

// Eigendecomposition-based primitives. sqrt/log require SPD input,
// exp requires symmetric input.
Matrix matrix_sqrt(const Matrix& p);
Matrix matrix_inv_sqrt(const Matrix& p);
Matrix matrix_log(const Matrix& p);
Matrix matrix_exp(const Matrix& v);

/// Log singular values of an invertible matrix, nonincreasing.
/// Throws SingularMatrix if any singular value underflows.
LogSingularVector log_singular_values(const Matrix& m);

/// Majorization order on nonincreasing vectors: partial-sum dominance,
/// with total-sum equality (strong) or inequality (weak).
bool majorize_leq(const LogSingularVector& xi, const LogSingularVector& eta,
                  bool weak = false, double tol = 1e-9);

/// Trace-metric distance d(p,q) = ||log eigenvalues of p^{-1/2} q p^{-1/2}||_2.
double distance(const Matrix& p, const Matrix& q);

/// Geodesic p #_t q = p^{1/2} (p^{-1/2} q p^{-1/2})^t p^{1/2}.
Matrix geodesic(const Matrix& p, const Matrix& q, double t);

/// Geodesic through p with initial direction v (symmetric):
/// p^{1/2} exp(t p^{-1/2} v p^{-1/2}) p^{1/2}.
Matrix geodesic_from(const Matrix& p, const Matrix& v, double t);

/// Congruence action g * p = g p g^T.
Matrix gl_action(const Matrix& g, const Matrix& p);

/// Vectorial distance 2 sigma(p^{-1/2} q^{1/2}); refines distance() into
/// the cone of nonincreasing vectors.
LogSingularVector vectorial_distance(const Matrix& p, const Matrix& q);

/// Riemannian logarithm log_p(q) = p^{1/2} log(p^{-1/2} q p^{-1/2}) p^{1/2}.
Matrix riemannian_log(const Matrix& p, const Matrix& q);

/// Full SVD with deterministic output: columns in descending singular-value
/// order, ties broken lexicographically on the left singular vector, signs
/// fixed so the first nonzero entry of each left singular vector is positive.
struct SvdResult {
  Matrix u;
  Vector sigma;
  Matrix v;
};
SvdResult deterministic_svd(const Matrix& m);

/// Karcher mean: minimizer of sum_i d(p, p_i)^2. Damped fixed-point
/// iteration initialized at the arithmetic mean; the step shrinks when the
/// gradient norm fails to decrease and regrows after accepted moves.
/// Throws NoConvergence past the iteration cap.
Matrix barycenter(std::span<const Matrix> points,
                  const ToleranceProfile& tol = {});
Matrix barycenter(const std::vector<Matrix>& points,
                  const ToleranceProfile& tol = {});

}  // namespace spd
}  // namespace lyapopt
