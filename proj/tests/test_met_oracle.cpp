#include "lyapopt/met_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace lyapopt;

namespace {

TorusSystem automorphism(int a, int b, int c, int d, const char* name) {
  Eigen::MatrixXi m(2, 2);
  m << a, b, c, d;
  return TorusSystem(ToralAutomorphism{m}, name);
}

}  // namespace

TEST_CASE("oracle reproduces the cat map exponents") {
  TorusSystem sys = automorphism(2, 1, 1, 1, "cat");
  MeasureWeights w = MeasureWeights::lebesgue(8, 2);
  LyapunovEstimate est = lyapunov_vector(sys, w, {10000, 64, 1});
  const double target = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  CHECK(est.lambda[0] == doctest::Approx(target).epsilon(1e-9));
  CHECK(est.lambda[1] == doctest::Approx(-target).epsilon(1e-9));
  CHECK(est.per_point_spread < 1e-9);  // constant Jacobian: no spread
}

TEST_CASE("oracle reproduces the [[2,3],[1,2]] exponents") {
  TorusSystem sys = automorphism(2, 3, 1, 2, "B");
  MeasureWeights w = MeasureWeights::lebesgue(8, 2);
  LyapunovEstimate est = lyapunov_vector(sys, w, {10000, 16, 1});
  const double target = std::log(2.0 + std::sqrt(3.0));  // top eigenvalue of B
  CHECK(est.lambda[0] == doctest::Approx(target).epsilon(1e-9));
  CHECK(est.lambda[1] == doctest::Approx(-target).epsilon(1e-9));
}

TEST_CASE("identity automorphism has zero exponents") {
  TorusSystem sys = automorphism(1, 0, 0, 1, "id");
  MeasureWeights w = MeasureWeights::lebesgue(4, 2);
  LyapunovEstimate est = lyapunov_vector(sys, w, {1000, 8, 1});
  CHECK(std::abs(est.lambda[0]) < 1e-12);
  CHECK(std::abs(est.lambda[1]) < 1e-12);
}

TEST_CASE("standard map exponents sum to zero") {
  TorusSystem sys(StandardMap{1.5}, "std");
  MeasureWeights w = MeasureWeights::lebesgue(8, 2);
  LyapunovEstimate est = lyapunov_vector(sys, w, {20000, 32, 2});
  CHECK(est.lambda[0] + est.lambda[1] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(est.lambda[0] > 0.05);  // K = 1.5 has a large chaotic sea
}

TEST_CASE("determinant growth matches the exponent sum") {
  TorusSystem sys(StandardMap{1.5}, "std");
  MeasureWeights w = MeasureWeights::lebesgue(8, 2);
  CHECK(std::abs(det_growth_check(sys, w, {2000, 16, 3})) < 1e-10);
}

TEST_CASE("oracle is seed-reproducible") {
  TorusSystem sys(StandardMap{1.5}, "std");
  MeasureWeights w = MeasureWeights::lebesgue(8, 2);
  LyapunovEstimate a = lyapunov_vector(sys, w, {2000, 8, 7});
  LyapunovEstimate b = lyapunov_vector(sys, w, {2000, 8, 7});
  CHECK(a.lambda[0] == b.lambda[0]);
  CHECK(a.lambda[1] == b.lambda[1]);
  LyapunovEstimate c = lyapunov_vector(sys, w, {2000, 8, 8});
  CHECK(a.lambda[0] != c.lambda[0]);  // different seed, different orbits
}
