#include "lyapopt/dynamics.hpp"
#include "lyapopt/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace lyapopt;

namespace {

TorusSystem cat_map() {
  Eigen::MatrixXi a(2, 2);
  a << 2, 1, 1, 1;
  return TorusSystem(ToralAutomorphism{a}, "cat");
}

Vector random_point(Rng& rng, int d) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.uniform();
  return v;
}

}  // namespace

TEST_CASE("torus points wrap into [0,1)") {
  Vector v(2);
  v << 1.25, -0.25;
  TorusPoint x(v);
  CHECK(x[0] == doctest::Approx(0.25));
  CHECK(x[1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(TorusPoint(Vector(0)), DimensionMismatch);
}

TEST_CASE("automorphism basics") {
  TorusSystem sys = cat_map();
  CHECK(sys.dim() == 2);
  CHECK(sys.is_automorphism());

  // The origin is fixed.
  Vector zero = Vector::Zero(2);
  CHECK(sys.apply(TorusPoint(zero)).coords().norm() == doctest::Approx(0.0));

  // Constant Jacobian with determinant 1.
  Rng rng(3);
  const Matrix j = sys.jacobian(TorusPoint(random_point(rng, 2)));
  CHECK(j(0, 0) == 2.0);
  CHECK(j.determinant() == doctest::Approx(1.0).epsilon(1e-12));

  // apply_inverse inverts apply.
  for (int trial = 0; trial < 50; ++trial) {
    TorusPoint x(random_point(rng, 2));
    TorusPoint back = sys.apply_inverse(sys.apply(x));
    for (int i = 0; i < 2; ++i) {
      double diff = std::abs(back[i] - x[i]);
      diff = std::min(diff, 1.0 - diff);
      CHECK(diff < 1e-12);
    }
  }

  Eigen::MatrixXi bad(2, 2);
  bad << 2, 0, 0, 1;
  CHECK_THROWS_AS(TorusSystem(ToralAutomorphism{bad}, "bad"),
                  std::invalid_argument);
}

TEST_CASE("standard map preserves area and inverts") {
  TorusSystem sys(StandardMap{1.5}, "std");
  CHECK(!sys.is_automorphism());
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    TorusPoint x(random_point(rng, 2));
    CHECK(sys.jacobian(x).determinant() == doctest::Approx(1.0).epsilon(1e-12));
    TorusPoint back = sys.apply_inverse(sys.apply(x));
    for (int i = 0; i < 2; ++i) {
      double diff = std::abs(back[i] - x[i]);
      diff = std::min(diff, 1.0 - diff);
      CHECK(diff < 1e-10);
    }
  }
}

TEST_CASE("perturbed automorphism reduces to the automorphism at epsilon 0") {
  Eigen::MatrixXi a(2, 2);
  a << 2, 1, 1, 1;
  TorusSystem pert(PerturbedAutomorphism{a, 0.0}, "pert0");
  CHECK(pert.is_automorphism());
  TorusSystem pert2(PerturbedAutomorphism{a, 0.1}, "pert");
  CHECK(!pert2.is_automorphism());

  Rng rng(7);
  TorusSystem plain = cat_map();
  for (int trial = 0; trial < 20; ++trial) {
    TorusPoint x(random_point(rng, 2));
    CHECK((pert.apply(x).coords() - plain.apply(x).coords()).norm() < 1e-12);
    CHECK(pert2.jacobian(x).determinant() == doctest::Approx(1.0).epsilon(1e-12));
    TorusPoint back = pert2.apply_inverse(pert2.apply(x));
    for (int i = 0; i < 2; ++i) {
      double diff = std::abs(back[i] - x[i]);
      diff = std::min(diff, 1.0 - diff);
      CHECK(diff < 1e-10);
    }
  }
}

TEST_CASE("iterate_jacobian chains one-step Jacobians") {
  TorusSystem sys(StandardMap{1.5}, "std");
  Rng rng(9);
  TorusPoint x(random_point(rng, 2));
  Matrix manual = Matrix::Identity(2, 2);
  TorusPoint y = x;
  for (int i = 0; i < 5; ++i) {
    manual = sys.jacobian(y) * manual;
    y = sys.apply(y);
  }
  CHECK((sys.iterate_jacobian(x, 5) - manual).norm() < 1e-12);
  CHECK_THROWS_AS(sys.iterate_jacobian(x, 0), std::invalid_argument);
}

TEST_CASE("cell indexing is lexicographic") {
  Vector v(2);
  v << 0.0, 0.0;
  CHECK(cell_of_point(TorusPoint(v), 4) == 0);
  v << 0.0, 0.3;
  CHECK(cell_of_point(TorusPoint(v), 4) == 1);
  v << 0.3, 0.0;
  CHECK(cell_of_point(TorusPoint(v), 4) == 4);
  v << 0.99, 0.99;
  CHECK(cell_of_point(TorusPoint(v), 4) == 15);
}

TEST_CASE("measure weights validate and normalize") {
  MeasureWeights w = MeasureWeights::lebesgue(4, 2);
  CHECK(w.resolution() == 4);
  double sum = 0.0;
  for (std::size_t c = 0; c < 16; ++c) sum += w[c];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(MeasureWeights(4, 2, std::vector<double>(15, 1.0 / 15)),
                  DimensionMismatch);
  CHECK_THROWS_AS(MeasureWeights(4, 2, std::vector<double>(16, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("Birkhoff weights of the cat map approach Lebesgue") {
  TorusSystem sys = cat_map();
  MeasureWeights emp = MeasureWeights::birkhoff(sys, 4, 200000, 1000, 42);
  const double uniform = 1.0 / 16.0;
  double l1 = 0.0;
  for (std::size_t c = 0; c < 16; ++c) l1 += std::abs(emp[c] - uniform);
  CHECK(l1 < 0.05);  // ergodicity of the linear automorphism
}
