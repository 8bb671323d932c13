#pragma once

// Measure-preserving maps on the d-torus: toral automorphisms, the
// Chirikov standard map, and perturbed automorphisms, together with
// Jacobian evaluation and discretized invariant-measure weights.

#include "lyapopt/spd.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace lyapopt {

/// Point on T^d, coordinates reduced mod 1 into [0,1).
class TorusPoint {
 public:
  explicit TorusPoint(Vector coords);
  int dim() const { return static_cast<int>(coords_.size()); }
  const Vector& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }

 private:
  Vector coords_;
};

/// Hyperbolic or parabolic integer matrix with |det| = 1, acting linearly
/// on the torus.
struct ToralAutomorphism {
  Eigen::MatrixXi matrix;
};

/// Chirikov standard map on [0,1)^2:
///   x1' = x1 + x2 + (K/2pi) sin(2pi x1),  x2' = x2 + (K/2pi) sin(2pi x1).
struct StandardMap {
  double stochasticity = 0.0;  // K
};

/// Automorphism composed with an area-preserving sinusoidal shear of
/// strength epsilon; epsilon = 0 recovers the plain automorphism.
struct PerturbedAutomorphism {
  Eigen::MatrixXi matrix;
  double epsilon = 0.0;
};

class TorusSystem {
 public:
  using Kind = std::variant<ToralAutomorphism, StandardMap, PerturbedAutomorphism>;

  TorusSystem(Kind kind, std::string description = {});

  int dim() const { return dim_; }
  const std::string& description() const { return description_; }
  const Kind& kind() const { return kind_; }

  /// True when the map is linear on the torus and preserves the uniform
  /// grid as a point set (integer-matrix automorphisms).
  bool is_automorphism() const;

  TorusPoint apply(const TorusPoint& x) const;
  TorusPoint apply_inverse(const TorusPoint& x) const;
  Matrix jacobian(const TorusPoint& x) const;

  /// Chain-rule product df_{f^{n-1}x} ... df_x. Sets *overflowed when any
  /// entry exceeds 1e150 (caller should switch to the QR path).
  Matrix iterate_jacobian(const TorusPoint& x, int n,
                          bool* overflowed = nullptr) const;

 private:
  Kind kind_;
  int dim_;
  std::string description_;
};

/// Discretized invariant measure: one nonnegative weight per grid cell,
/// summing to 1. Cells are indexed lexicographically.
class MeasureWeights {
 public:
  MeasureWeights(int resolution, int dim, std::vector<double> weights);

  static MeasureWeights lebesgue(int resolution, int dim);
  static MeasureWeights birkhoff(const TorusSystem& sys, int resolution,
                                 std::int64_t orbit_length, std::int64_t burn_in,
                                 std::uint64_t seed);

  int resolution() const { return resolution_; }
  int dim() const { return dim_; }
  std::size_t cell_count() const { return weights_.size(); }
  double operator[](std::size_t cell) const { return weights_[cell]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int resolution_;
  int dim_;
  std::vector<double> weights_;
};

/// Lexicographic cell index of the cell containing x on an n^d grid.
std::size_t cell_of_point(const TorusPoint& x, int resolution);

}  // namespace lyapopt
