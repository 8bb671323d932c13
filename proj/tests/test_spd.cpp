#include "lyapopt/rng.hpp"
#include "lyapopt/spd.hpp"

#include <doctest.h>

#include <cmath>

using namespace lyapopt;

namespace {

// log((3+sqrt(5))/2): top log singular value of [[2,1],[1,1]].
const double kCatLambda = std::log((3.0 + std::sqrt(5.0)) / 2.0);

Matrix random_matrix(Rng& rng, int d, double scale = 1.0) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

Matrix random_spd(Rng& rng, int d, double scale = 1.0) {
  const Matrix v = spd::sym(random_matrix(rng, d, scale));
  return spd::matrix_exp(v);
}

}  // namespace

TEST_CASE("log singular vector invariants") {
  Vector v(3);
  v << 2.0, 1.0, -1.0;
  LogSingularVector x(v);
  CHECK(x.dim() == 3);
  CHECK(x[0] == 2.0);

  Vector ps = x.partial_sums();
  CHECK(ps[0] == doctest::Approx(2.0));
  CHECK(ps[1] == doctest::Approx(3.0));
  CHECK(ps[2] == doctest::Approx(2.0));

  Vector bad(2);
  bad << 0.0, 1.0;
  CHECK_THROWS_AS(LogSingularVector{bad}, std::invalid_argument);

  LogSingularVector sum = x + x;
  CHECK(sum[1] == doctest::Approx(2.0));
  LogSingularVector scaled = x * 0.5;
  CHECK(scaled[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(x * -1.0, std::invalid_argument);
}

TEST_CASE("log singular values of the cat map matrix") {
  Matrix a(2, 2);
  a << 2, 1, 1, 1;
  LogSingularVector sv = spd::log_singular_values(a);
  CHECK(sv[0] == doctest::Approx(kCatLambda).epsilon(1e-12));
  CHECK(sv[1] == doctest::Approx(-kCatLambda).epsilon(1e-12));
  CHECK_THROWS_AS(spd::log_singular_values(Matrix::Zero(2, 2)), SingularMatrix);
}

TEST_CASE("majorization order") {
  Vector a(2), b(2);
  a << 1.0, -1.0;
  b << 2.0, -2.0;
  LogSingularVector xa(a), xb(b);
  CHECK(spd::majorize_leq(xa, xa));
  CHECK(spd::majorize_leq(xa, xb));       // equal total sums, dominated prefix
  CHECK(!spd::majorize_leq(xb, xa));
  Vector c(2);
  c << 2.0, 0.0;
  LogSingularVector xc(c);
  CHECK(!spd::majorize_leq(xa, xc));              // strong: sums differ
  CHECK(spd::majorize_leq(xa, xc, /*weak=*/true));
  CHECK(!spd::majorize_leq(xc, xa, /*weak=*/true));
}

TEST_CASE("Horn inequality on random pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(3));
    Matrix l1 = random_matrix(rng, d), l2 = random_matrix(rng, d);
    if (std::abs(l1.determinant()) < 1e-6 || std::abs(l2.determinant()) < 1e-6)
      continue;
    const auto lhs = spd::log_singular_values(l1 * l2);
    const auto rhs = spd::log_singular_values(l1) + spd::log_singular_values(l2);
    CHECK(spd::majorize_leq(lhs, rhs, /*weak=*/false, 1e-8));
  }
}

TEST_CASE("trace-metric distance and geodesics") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(3));
    const Matrix p = random_spd(rng, d), q = random_spd(rng, d);

    CHECK(spd::distance(p, p) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(spd::distance(p, q) == doctest::Approx(spd::distance(q, p)).epsilon(1e-10));

    // Endpoints and the constant-speed property.
    CHECK((spd::geodesic(p, q, 0.0) - p).norm() < 1e-10);
    CHECK((spd::geodesic(p, q, 1.0) - q).norm() < 1e-9);
    const Matrix mid = spd::geodesic(p, q, 0.5);
    CHECK(spd::distance(p, mid) ==
          doctest::Approx(0.5 * spd::distance(p, q)).epsilon(1e-9));

    // Exponential of the connecting log recovers q.
    const Matrix v = spd::riemannian_log(p, q);
    CHECK((spd::geodesic_from(p, v, 1.0) - q).norm() < 1e-8);

    // Congruence action is an isometry.
    Matrix g = random_matrix(rng, d);
    if (std::abs(g.determinant()) < 1e-6) continue;
    CHECK(spd::distance(spd::gl_action(g, p), spd::gl_action(g, q)) ==
          doctest::Approx(spd::distance(p, q)).epsilon(1e-8));
  }
}

TEST_CASE("vectorial distance refines the scalar distance") {
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(3));
    const Matrix p = random_spd(rng, d), q = random_spd(rng, d);
    const LogSingularVector dv = spd::vectorial_distance(p, q);
    double norm = 0.0;
    for (int i = 0; i < d; ++i) norm += dv[i] * dv[i];
    CHECK(std::sqrt(norm) == doctest::Approx(spd::distance(p, q)).epsilon(1e-9));
    // Total sum is the log-det ratio.
    double sum = 0.0;
    for (int i = 0; i < d; ++i) sum += dv[i];
    CHECK(sum == doctest::Approx(std::log(q.determinant() / p.determinant()))
                     .epsilon(1e-8));
  }
}

TEST_CASE("deterministic SVD reconstructs and orders") {
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(3));
    const Matrix m = random_matrix(rng, d);
    const spd::SvdResult r = spd::deterministic_svd(m);
    CHECK((r.u * r.sigma.asDiagonal() * r.v.transpose() - m).norm() < 1e-10);
    for (int i = 0; i + 1 < d; ++i) CHECK(r.sigma[i] >= r.sigma[i + 1]);
    for (int j = 0; j < d; ++j) {
      int i = 0;
      while (i < d && r.u(i, j) == 0.0) ++i;
      if (i < d) CHECK(r.u(i, j) > 0.0);
    }
  }
}

TEST_CASE("barycenter basics") {
  Rng rng(19);
  const int d = 2;
  const Matrix p = random_spd(rng, d), q = random_spd(rng, d);

  CHECK((spd::barycenter(std::vector<Matrix>{p}) - p).norm() < 1e-12);
  // Two points: the geodesic midpoint.
  const Matrix bar2 = spd::barycenter(std::vector<Matrix>{p, q});
  CHECK((bar2 - spd::geodesic(p, q, 0.5)).norm() < 1e-8);
  // Permutation invariance.
  const Matrix r = random_spd(rng, d);
  const Matrix b1 = spd::barycenter(std::vector<Matrix>{p, q, r});
  const Matrix b2 = spd::barycenter(std::vector<Matrix>{r, p, q});
  CHECK((b1 - b2).norm() < 1e-8);
  // Zero gradient at the returned point.
  Matrix grad = Matrix::Zero(d, d);
  for (const Matrix& pt : {p, q, r}) grad += spd::riemannian_log(b1, pt);
  CHECK(grad.norm() < 1e-9);
}

TEST_CASE("barycenter GL-equivariance") {
  Rng rng(23);
  const int d = 3;
  std::vector<Matrix> pts;
  for (int i = 0; i < 4; ++i) pts.push_back(random_spd(rng, d));
  Matrix g = random_matrix(rng, d);
  g += 3.0 * Matrix::Identity(d, d);  // keep it invertible
  std::vector<Matrix> moved;
  for (const Matrix& p : pts) moved.push_back(spd::gl_action(g, p));
  const Matrix lhs = spd::barycenter(moved);
  const Matrix rhs = spd::gl_action(g, spd::barycenter(pts));
  CHECK(spd::distance(lhs, rhs) < 1e-7);
}

TEST_CASE("barycenter contraction in the vectorial distance") {
  Rng rng(29);
  const int d = 2;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Matrix> ps, qs;
    Vector acc = Vector::Zero(d);
    for (int i = 0; i < 3; ++i) {
      ps.push_back(random_spd(rng, d));
      qs.push_back(random_spd(rng, d));
      acc += spd::vectorial_distance(ps.back(), qs.back()).values();
    }
    const auto lhs =
        spd::vectorial_distance(spd::barycenter(ps), spd::barycenter(qs));
    // d(bar p, bar q) weakly majorized by the average of d(p_i, q_i).
    CHECK(spd::majorize_leq(lhs, LogSingularVector(acc / 3.0), /*weak=*/true,
                            1e-7));
  }
}

TEST_CASE("barycenter of severely ill-conditioned pullback iterates") {
  // Iterated congruences of a hyperbolic matrix: conditions up to ~1e12.
  Matrix b(2, 2);
  b << 2, 3, 1, 2;
  std::vector<Matrix> pts;
  Matrix a = Matrix::Identity(2, 2);
  for (int k = 0; k < 6; ++k) {
    pts.push_back(spd::sym(a.transpose() * a));
    a = b * a;
  }
  const Matrix mean = spd::barycenter(pts);
  Matrix grad = Matrix::Zero(2, 2);
  for (const Matrix& p : pts) grad += spd::riemannian_log(mean, p);
  CHECK(grad.norm() < 1e-6 * static_cast<double>(pts.size()));
}

TEST_CASE("spd error reporting") {
  Matrix notsym(2, 2);
  notsym << 1, 2, 0, 1;
  CHECK_THROWS_AS(spd::check_symmetric(notsym), NotPositiveDefinite);
  Matrix indef(2, 2);
  indef << 1, 0, 0, -1;
  CHECK_THROWS_AS(spd::check_spd(indef), NotPositiveDefinite);
  CHECK_THROWS_AS(spd::matrix_sqrt(indef), NotPositiveDefinite);
  CHECK_THROWS_AS(spd::distance(Matrix::Identity(2, 2), Matrix::Identity(3, 3)),
                  DimensionMismatch);
  CHECK_THROWS_AS(spd::barycenter(std::vector<Matrix>{}), std::invalid_argument);
}
