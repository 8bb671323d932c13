// Microbenchmarks for the hot paths: SPD primitives, field operations,
// the objective sweep, gradient assembly, and full descent steps.

#include "lyapopt/optimizer.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace lyapopt;

namespace {

TorusSystem cat_map() {
  Eigen::MatrixXi a(2, 2);
  a << 2, 1, 1, 1;
  return TorusSystem(ToralAutomorphism{a}, "cat");
}

Matrix random_spd(std::uint64_t seed, double spread) {
  MetricField g = random_field(2, 2, spread, seed, 0.0);
  return g[0];
}

void BM_SpdGeodesic(benchmark::State& state) {
  const Matrix p = random_spd(1, 1.0), q = random_spd(2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spd::geodesic(p, q, 0.37));
}
BENCHMARK(BM_SpdGeodesic);

void BM_SpdVectorialDistance(benchmark::State& state) {
  const Matrix p = random_spd(3, 1.0), q = random_spd(4, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spd::vectorial_distance(p, q));
}
BENCHMARK(BM_SpdVectorialDistance);

void BM_SpdBarycenter(benchmark::State& state) {
  std::vector<Matrix> pts;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i)
    pts.push_back(random_spd(10 + i, 1.5));
  for (auto _ : state) benchmark::DoNotOptimize(spd::barycenter(pts));
}
BENCHMARK(BM_SpdBarycenter)->Arg(4)->Arg(16);

void BM_FieldEvaluate(benchmark::State& state) {
  MetricField g = random_field(16, 2, 0.8, 5, 0.5);
  Vector v(2);
  v << 0.317, 0.613;
  const TorusPoint x(v);
  for (auto _ : state) benchmark::DoNotOptimize(g.evaluate(x));
}
BENCHMARK(BM_FieldEvaluate);

void BM_Pullback(benchmark::State& state) {
  TorusSystem sys = cat_map();
  MetricField g = random_field(16, 2, 0.8, 6, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(pullback(sys, g));
}
BENCHMARK(BM_Pullback);

void BM_Objective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TorusSystem sys = cat_map();
  MetricField g = random_field(n, 2, 0.8, 7, 0.0);
  MeasureWeights w = MeasureWeights::lebesgue(n, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_objective(sys, g, w));
}
BENCHMARK(BM_Objective)->Arg(8)->Arg(32);

void BM_GradientField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TorusSystem sys(StandardMap{1.5}, "std");
  MetricField g = random_field(n, 2, 0.5, 8, 0.5);
  MeasureWeights w = MeasureWeights::lebesgue(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(gradient_field(sys, g, w, 1));
}
BENCHMARK(BM_GradientField)->Arg(8)->Arg(32);

void BM_DescentIteration(benchmark::State& state) {
  Eigen::MatrixXi b(2, 2);
  b << 2, 3, 1, 2;
  TorusSystem sys(ToralAutomorphism{b}, "B");
  MetricField g0 = MetricField::flat(16, 2, 0.0);
  MeasureWeights w = MeasureWeights::lebesgue(16, 2);
  OptimizerConfig cfg;
  cfg.k_weights = Vector::Zero(2);
  cfg.k_weights[0] = 1.0;
  cfg.max_iters = 5;
  for (auto _ : state) benchmark::DoNotOptimize(descend(sys, g0, w, cfg));
}
BENCHMARK(BM_DescentIteration);

void BM_Oracle(benchmark::State& state) {
  TorusSystem sys = cat_map();
  MeasureWeights w = MeasureWeights::lebesgue(8, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(lyapunov_vector(sys, w, {5000, 8, 1}));
}
BENCHMARK(BM_Oracle);

}  // namespace

BENCHMARK_MAIN();
