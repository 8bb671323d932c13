#pragma once

// Discretized volume-normalized Riemannian metric fields on the torus
// grid: evaluation (log-Euclidean interpolation), pullback by a system,
// cell-wise barycenters, geodesics, connecting tangents and L2 distances.

#include "lyapopt/dynamics.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace lyapopt {

struct VolumeNotPreserved : std::domain_error {
  using std::domain_error::domain_error;
};
struct TangencyViolated : std::domain_error {
  using std::domain_error::domain_error;
};

/// Grid-indexed symmetric matrices with pointwise g-trace zero; a tangent
/// vector to the space of det-1 metric fields at some base field.
class TangentField {
 public:
  TangentField(int resolution, int dim, std::vector<Matrix> values);

  int resolution() const { return resolution_; }
  int dim() const { return dim_; }
  std::size_t cell_count() const { return values_.size(); }
  const Matrix& operator[](std::size_t cell) const { return values_[cell]; }
  Matrix& operator[](std::size_t cell) { return values_[cell]; }
  const std::vector<Matrix>& values() const { return values_; }

  TangentField operator*(double s) const;
  TangentField operator-() const { return *this * -1.0; }

 private:
  int resolution_;
  int dim_;
  std::vector<Matrix> values_;
};

/// Det-normalized SPD Gram matrices, one per grid cell. Cell sample points
/// sit at the lower-left corner (offset 0) for automorphism-invariant
/// grids and at the cell center (offset 1/2) otherwise.
class MetricField {
 public:
  MetricField(int resolution, int dim, std::vector<Matrix> values,
              double sample_offset = 0.0);

  /// Identity Gram matrix everywhere (the flat reference metric).
  static MetricField flat(int resolution, int dim, double sample_offset = 0.0);

  /// Sample offset matching the system's grid convention: 0 for
  /// automorphisms (the grid is f-invariant), 1/2 otherwise.
  static double offset_for(const TorusSystem& sys);

  int resolution() const { return resolution_; }
  int dim() const { return dim_; }
  double sample_offset() const { return sample_offset_; }
  std::size_t cell_count() const { return values_.size(); }
  const Matrix& operator[](std::size_t cell) const { return values_[cell]; }
  const std::vector<Matrix>& values() const { return values_; }

  /// Coordinates of a cell's sample point.
  TorusPoint sample_point(std::size_t cell) const;

  /// Log-Euclidean multilinear interpolation of the surrounding cell
  /// values; exact at sample points, det-1 preserving.
  Matrix evaluate(const TorusPoint& x) const;

  /// The interpolation stencil at x: surrounding cells with their
  /// multilinear weights (zero-weight corners omitted, so a sample point
  /// returns a single entry with weight 1).
  std::vector<std::pair<std::size_t, double>> stencil(const TorusPoint& x) const;

  bool same_grid(const MetricField& other) const;
  bool same_grid(const TangentField& h) const;

 private:
  int resolution_;
  int dim_;
  double sample_offset_;
  std::vector<Matrix> values_;
};

/// Pullback (F*g)_x = A_x^T g_{Fx} A_x per cell, renormalized to det 1.
/// Throws VolumeNotPreserved unless |det A_x| = 1 at every cell.
MetricField pullback(const TorusSystem& sys, const MetricField& g);

/// Cell-wise Karcher barycenter of matching fields.
MetricField field_barycenter(const std::vector<MetricField>& fields,
                             const ToleranceProfile& tol = {});

/// Geodesic g exp(t g^{-1} h) per cell. Throws TangencyViolated if h is
/// not trace-free against g.
MetricField geodesic_step(const MetricField& g, const TangentField& h, double t,
                          double tangency_tol = 1e-8);

/// Initial direction of the connecting geodesic from g to g2:
/// h = g^{1/2} log(g^{-1/2} g2 g^{-1/2}) g^{1/2} per cell.
TangentField connecting_tangent(const MetricField& g, const MetricField& g2);

/// Measure-weighted L2 distance (sum_c w_c d(g1_c, g2_c)^2)^{1/2}.
double l2_distance(const MetricField& g1, const MetricField& g2,
                   const MeasureWeights& weights);

/// L2 inner product sum_c w_c tr(g_c^{-1} a_c g_c^{-1} b_c).
double l2_inner(const MetricField& g, const TangentField& a,
                const TangentField& b, const MeasureWeights& weights);

/// Barycenter of the first N pullback iterates of g0 (g0, f*g0, ...,
/// f^{N-1}*g0); N = 1 returns g0.
MetricField bochi_sequence(const TorusSystem& sys, const MetricField& g0, int N,
                           const ToleranceProfile& tol = {});

/// Random det-1 field: cell values are geodesic exponentials of random
/// trace-free symmetric directions of norm <= magnitude.
MetricField random_field(int resolution, int dim, double magnitude,
                         std::uint64_t seed, double sample_offset = 0.0);

/// Random unit-L2-norm tangent field at g.
TangentField random_tangent(const MetricField& g, const MeasureWeights& weights,
                            std::uint64_t seed);

}  // namespace lyapopt
