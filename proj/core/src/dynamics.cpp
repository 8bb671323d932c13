#include "lyapopt/dynamics.hpp"

#include "lyapopt/rng.hpp"

#include <cmath>
#include <numbers>

namespace lyapopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod1(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // guard against floor rounding at the boundary
  return r;
}

Vector mod1(Vector v) {
  for (int i = 0; i < v.size(); ++i) v[i] = mod1(v[i]);
  return v;
}

// Integer inverse of an integer matrix with |det| = 1 (adjugate / det).
Eigen::MatrixXi integer_inverse(const Eigen::MatrixXi& a) {
  const Matrix ad = a.cast<double>();
  const double det = ad.determinant();
  Matrix inv = ad.inverse();
  Eigen::MatrixXi out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out(i, j) = static_cast<int>(std::llround(inv(i, j)));
  (void)det;
  return out;
}

void check_unimodular(const Eigen::MatrixXi& a) {
  const double det = a.cast<double>().determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-9)
    throw std::invalid_argument("automorphism matrix must have |det| = 1");
}

// Area-preserving shear used by PerturbedAutomorphism (d = 2):
// h(x) = (x1 + (eps/2pi) sin(2pi x2), x2).
Vector shear_apply(const Vector& x, double eps) {
  Vector y = x;
  y[0] += eps / kTwoPi * std::sin(kTwoPi * x[1]);
  return y;
}

Vector shear_inverse(const Vector& y, double eps) {
  Vector x = y;
  x[0] -= eps / kTwoPi * std::sin(kTwoPi * y[1]);
  return x;
}

Matrix shear_jacobian(const Vector& x, double eps) {
  Matrix j = Matrix::Identity(2, 2);
  j(0, 1) = eps * std::cos(kTwoPi * x[1]);
  return j;
}

}  // namespace

TorusPoint::TorusPoint(Vector coords) : coords_(mod1(std::move(coords))) {
  if (coords_.size() == 0) throw DimensionMismatch("empty torus point");
}

TorusSystem::TorusSystem(Kind kind, std::string description)
    : kind_(std::move(kind)), description_(std::move(description)) {
  std::visit(
      [this](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ToralAutomorphism>) {
          check_unimodular(k.matrix);
          dim_ = static_cast<int>(k.matrix.rows());
        } else if constexpr (std::is_same_v<T, StandardMap>) {
          dim_ = 2;
        } else {
          check_unimodular(k.matrix);
          if (k.matrix.rows() != 2)
            throw std::invalid_argument("perturbed automorphism requires d = 2");
          dim_ = 2;
        }
      },
      kind_);
}

bool TorusSystem::is_automorphism() const {
  if (std::holds_alternative<ToralAutomorphism>(kind_)) return true;
  if (const auto* p = std::get_if<PerturbedAutomorphism>(&kind_))
    return p->epsilon == 0.0;
  return false;
}

TorusPoint TorusSystem::apply(const TorusPoint& x) const {
  if (x.dim() != dim_) throw DimensionMismatch("point dim mismatch");
  return std::visit(
      [&](const auto& k) -> TorusPoint {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ToralAutomorphism>) {
          return TorusPoint(k.matrix.template cast<double>() * x.coords());
        } else if constexpr (std::is_same_v<T, StandardMap>) {
          const double kick = k.stochasticity / kTwoPi * std::sin(kTwoPi * x[0]);
          Vector y(2);
          y[0] = x[0] + x[1] + kick;
          y[1] = x[1] + kick;
          return TorusPoint(std::move(y));
        } else {
          return TorusPoint(k.matrix.template cast<double>() *
                            shear_apply(x.coords(), k.epsilon));
        }
      },
      kind_);
}

TorusPoint TorusSystem::apply_inverse(const TorusPoint& x) const {
  if (x.dim() != dim_) throw DimensionMismatch("point dim mismatch");
  return std::visit(
      [&](const auto& k) -> TorusPoint {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ToralAutomorphism>) {
          return TorusPoint(integer_inverse(k.matrix).template cast<double>() * x.coords());
        } else if constexpr (std::is_same_v<T, StandardMap>) {
          Vector y(2);
          y[0] = mod1(x[0] - x[1]);
          y[1] = x[1] - k.stochasticity / kTwoPi * std::sin(kTwoPi * y[0]);
          return TorusPoint(std::move(y));
        } else {
          const Vector z = mod1(
              Vector(integer_inverse(k.matrix).template cast<double>() * x.coords()));
          return TorusPoint(shear_inverse(z, k.epsilon));
        }
      },
      kind_);
}

Matrix TorusSystem::jacobian(const TorusPoint& x) const {
  if (x.dim() != dim_) throw DimensionMismatch("point dim mismatch");
  return std::visit(
      [&](const auto& k) -> Matrix {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ToralAutomorphism>) {
          return k.matrix.template cast<double>();
        } else if constexpr (std::is_same_v<T, StandardMap>) {
          const double c = k.stochasticity * std::cos(kTwoPi * x[0]);
          Matrix j(2, 2);
          j << 1.0 + c, 1.0, c, 1.0;
          return j;
        } else {
          return k.matrix.template cast<double>() * shear_jacobian(x.coords(), k.epsilon);
        }
      },
      kind_);
}

Matrix TorusSystem::iterate_jacobian(const TorusPoint& x, int n,
                                     bool* overflowed) const {
  if (n < 1) throw std::invalid_argument("iterate count must be >= 1");
  if (overflowed) *overflowed = false;
  Matrix acc = Matrix::Identity(dim_, dim_);
  TorusPoint y = x;
  for (int i = 0; i < n; ++i) {
    acc = jacobian(y) * acc;
    y = apply(y);
    if (overflowed && acc.cwiseAbs().maxCoeff() > 1e150) *overflowed = true;
  }
  return acc;
}

MeasureWeights::MeasureWeights(int resolution, int dim, std::vector<double> weights)
    : resolution_(resolution), dim_(dim), weights_(std::move(weights)) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  std::size_t expected = 1;
  for (int i = 0; i < dim; ++i) expected *= static_cast<std::size_t>(resolution);
  if (weights_.size() != expected)
    throw DimensionMismatch("weight count does not match grid");
  double sum = 0.0;
  for (double w : weights_) {
    if (w < 0.0) throw std::invalid_argument("negative measure weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("measure weights must sum to 1");
}

MeasureWeights MeasureWeights::lebesgue(int resolution, int dim) {
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) cells *= static_cast<std::size_t>(resolution);
  return MeasureWeights(resolution, dim,
                        std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
}

MeasureWeights MeasureWeights::birkhoff(const TorusSystem& sys, int resolution,
                                        std::int64_t orbit_length,
                                        std::int64_t burn_in, std::uint64_t seed) {
  Rng rng(seed);
  Vector start(sys.dim());
  for (int i = 0; i < sys.dim(); ++i) start[i] = rng.uniform();
  TorusPoint x{start};
  for (std::int64_t i = 0; i < burn_in; ++i) x = sys.apply(x);

  std::size_t cells = 1;
  for (int i = 0; i < sys.dim(); ++i) cells *= static_cast<std::size_t>(resolution);
  std::vector<double> counts(cells, 0.0);
  for (std::int64_t i = 0; i < orbit_length; ++i) {
    counts[cell_of_point(x, resolution)] += 1.0;
    x = sys.apply(x);
  }
  for (double& c : counts) c /= static_cast<double>(orbit_length);
  // Scrub the float sum to exactly 1 within tolerance of the invariant.
  double sum = 0.0;
  for (double c : counts) sum += c;
  for (double& c : counts) c /= sum;
  return MeasureWeights(resolution, sys.dim(), std::move(counts));
}

std::size_t cell_of_point(const TorusPoint& x, int resolution) {
  std::size_t idx = 0;
  for (int i = 0; i < x.dim(); ++i) {
    auto c = static_cast<std::size_t>(x[i] * resolution);
    if (c >= static_cast<std::size_t>(resolution)) c = resolution - 1;
    idx = idx * static_cast<std::size_t>(resolution) + c;
  }
  return idx;
}

}  // namespace lyapopt
