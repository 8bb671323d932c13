// Command-line driver: oracle | evaluate | optimize | verify | bochi.
// Experiments are described by a single JSON config; a few flags override
// config scalars for quick runs.

#include "lyapopt/rng.hpp"
#include "lyapopt/serialization.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using nlohmann::json;
using namespace lyapopt;

struct RunConfig {
  TorusSystem system;
  int grid_n = 16;
  std::string measure_mode = "lebesgue";
  std::int64_t measure_orbit_length = 1000000;
  std::int64_t measure_burn_in = 1000;
  std::uint64_t measure_seed = 7;
  OracleConfig oracle;
  OptimizerConfig optimizer;
  std::string out_metric;
  std::string out_trace;
  std::string out_summary;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                    const std::string& section) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + section);
  }
}

Eigen::MatrixXi parse_int_matrix(const json& j) {
  const int d = static_cast<int>(j.size());
  Eigen::MatrixXi m(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(j[i].size()) != d)
      throw ConfigError("system.matrix must be square");
    for (int k = 0; k < d; ++k) m(i, k) = j[i][k].get<int>();
  }
  return m;
}

TorusSystem parse_system(const json& j) {
  reject_unknown(j, {"kind", "matrix", "K", "epsilon", "description"}, "system");
  const std::string kind = j.at("kind").get<std::string>();
  const std::string desc = j.value("description", kind);
  if (kind == "toral_automorphism")
    return TorusSystem(ToralAutomorphism{parse_int_matrix(j.at("matrix"))}, desc);
  if (kind == "standard_map")
    return TorusSystem(StandardMap{j.at("K").get<double>()}, desc);
  if (kind == "perturbed_automorphism")
    return TorusSystem(PerturbedAutomorphism{parse_int_matrix(j.at("matrix")),
                                             j.value("epsilon", 0.0)},
                       desc);
  throw ConfigError("unknown system.kind '" + kind + "'");
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"system", "grid", "measure", "oracle", "optimizer", "output"},
                 "config");

  RunConfig cfg{parse_system(j.at("system"))};

  if (j.contains("grid")) {
    reject_unknown(j["grid"], {"n"}, "grid");
    cfg.grid_n = j["grid"].value("n", 16);
    if (cfg.grid_n < 2) throw ConfigError("grid.n must be >= 2");
  }
  if (j.contains("measure")) {
    reject_unknown(j["measure"], {"mode", "orbit_length", "burn_in", "seed"},
                   "measure");
    cfg.measure_mode = j["measure"].value("mode", "lebesgue");
    if (cfg.measure_mode != "lebesgue" && cfg.measure_mode != "birkhoff")
      throw ConfigError("measure.mode must be 'lebesgue' or 'birkhoff'");
    cfg.measure_orbit_length = j["measure"].value("orbit_length", int64_t{1000000});
    cfg.measure_burn_in = j["measure"].value("burn_in", int64_t{1000});
    cfg.measure_seed = j["measure"].value("seed", uint64_t{7});
  }
  if (j.contains("oracle")) {
    reject_unknown(j["oracle"], {"n_steps", "samples", "seed", "burn_in"},
                   "oracle");
    cfg.oracle.n_steps = j["oracle"].value("n_steps", int64_t{10000});
    cfg.oracle.samples = j["oracle"].value("samples", 64);
    cfg.oracle.seed = j["oracle"].value("seed", uint64_t{1});
    cfg.oracle.burn_in = j["oracle"].value("burn_in", int64_t{1000});
  }
  cfg.optimizer.k_weights = Vector::Zero(cfg.system.dim());
  cfg.optimizer.k_weights[0] = 1.0;
  if (j.contains("optimizer")) {
    reject_unknown(j["optimizer"],
                   {"k_weights", "max_iters", "step_init", "armijo_c",
                    "armijo_shrink", "grad_tol", "gap_margin", "seed"},
                   "optimizer");
    const json& o = j["optimizer"];
    if (o.contains("k_weights")) {
      const auto kw = o["k_weights"].get<std::vector<double>>();
      if (static_cast<int>(kw.size()) != cfg.system.dim())
        throw ConfigError("optimizer.k_weights length must equal system dim");
      cfg.optimizer.k_weights =
          Eigen::Map<const Vector>(kw.data(), static_cast<int>(kw.size()));
    }
    cfg.optimizer.max_iters = o.value("max_iters", 500);
    cfg.optimizer.step_init = o.value("step_init", 1.0);
    cfg.optimizer.armijo_c = o.value("armijo_c", 1e-4);
    cfg.optimizer.armijo_shrink = o.value("armijo_shrink", 0.5);
    cfg.optimizer.grad_tol = o.value("grad_tol", 1e-8);
    cfg.optimizer.gap_margin = o.value("gap_margin", 1e-6);
    cfg.optimizer.seed = o.value("seed", uint64_t{1});
  }
  if (j.contains("output")) {
    reject_unknown(j["output"], {"metric", "trace", "summary"}, "output");
    cfg.out_metric = j["output"].value("metric", "");
    cfg.out_trace = j["output"].value("trace", "");
    cfg.out_summary = j["output"].value("summary", "");
  }
  return cfg;
}

MeasureWeights make_weights(const RunConfig& cfg) {
  if (cfg.measure_mode == "birkhoff")
    return MeasureWeights::birkhoff(cfg.system, cfg.grid_n,
                                    cfg.measure_orbit_length,
                                    cfg.measure_burn_in, cfg.measure_seed);
  return MeasureWeights::lebesgue(cfg.grid_n, cfg.system.dim());
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  out << text << "\n";
}

int cmd_oracle(const RunConfig& cfg, const std::string& out_path) {
  const LyapunovEstimate est =
      lyapunov_vector(cfg.system, make_weights(cfg), cfg.oracle);
  emit(estimate_to_json(est), out_path);
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& metric_path,
                 const std::string& out_path, bool csv) {
  MetricField g = [&] {
    try {
      return load_metric(metric_path);
    } catch (const VolumeNotPreserved&) {
      throw ConfigError("metric file is not in M_omega (det-1 violated)");
    } catch (const std::exception& e) {
      throw ConfigError(std::string("cannot load metric file: ") + e.what());
    }
  }();
  if (g.resolution() != cfg.grid_n || g.dim() != cfg.system.dim())
    throw ConfigError("metric file grid does not match config grid");
  const MeasureWeights weights = make_weights(cfg);
  const LyapunovEstimate est = lyapunov_vector(cfg.system, weights, cfg.oracle);
  const ObjectiveReport report =
      evaluate_objective(cfg.system, g, weights, &est);
  emit(csv ? report_to_csv(report) : report_to_json(report), out_path);
  return 0;
}

int cmd_optimize(const RunConfig& cfg, const std::string& out_path) {
  const MeasureWeights weights = make_weights(cfg);
  const LyapunovEstimate est = lyapunov_vector(cfg.system, weights, cfg.oracle);
  const MetricField g0 = MetricField::flat(cfg.grid_n, cfg.system.dim(),
                                           MetricField::offset_for(cfg.system));
  const OptimizationResult result =
      descend(cfg.system, g0, weights, cfg.optimizer, &est);

  const std::string prefix =
      !out_path.empty() ? out_path
                        : (!cfg.out_metric.empty() ? cfg.out_metric : "optimize");
  const std::string metric_path =
      cfg.out_metric.empty() ? prefix + ".metric.json" : cfg.out_metric;
  const std::string trace_path =
      cfg.out_trace.empty() ? prefix + ".trace.csv" : cfg.out_trace;
  const std::string summary_path =
      cfg.out_summary.empty() ? prefix + ".summary.json" : cfg.out_summary;

  save_metric(result.field, metric_path);
  {
    std::ofstream out(trace_path);
    out << trace_to_csv(result.trace, cfg.system.dim());
  }
  const ObjectiveReport final_report =
      evaluate_objective(cfg.system, result.field, weights, &est);
  json summary;
  summary["s_partial"] = std::vector<double>(
      final_report.s_partial.data(),
      final_report.s_partial.data() + final_report.s_partial.size());
  summary["gap_to_oracle"] = std::vector<double>(
      final_report.gap_to_oracle.data(),
      final_report.gap_to_oracle.data() + final_report.gap_to_oracle.size());
  summary["iterations"] = result.iterations;
  summary["line_search_stalled"] = result.line_search_stalled;
  {
    std::ofstream out(summary_path);
    out << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return result.line_search_stalled ? 1 : 0;
}

double field_condition(const MetricField& g) {
  double worst = 1.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g[c]);
    worst = std::max(worst, es.eigenvalues().maxCoeff() /
                                es.eigenvalues().minCoeff());
  }
  return worst;
}

// Iterated pullbacks of a hyperbolic map blow up like exp(2 N lambda); past
// condition ~1e11 doubles cannot resolve the metric, so cap the usable depth.
int max_pullback_depth(const TorusSystem& sys, const MetricField& g0, int limit) {
  MetricField g = g0;
  int depth = 1;
  while (depth < limit) {
    const MetricField next = pullback(sys, g);
    if (field_condition(next) > 1e11) break;
    g = next;
    ++depth;
  }
  return depth;
}

int cmd_bochi(const RunConfig& cfg, const std::string& out_path) {
  const MeasureWeights weights = make_weights(cfg);
  const MetricField g0 = MetricField::flat(cfg.grid_n, cfg.system.dim(),
                                           MetricField::offset_for(cfg.system));
  std::ostringstream out;
  out << "N";
  for (int k = 1; k <= cfg.system.dim(); ++k) out << ",s_" << k;
  out << "\n";
  const int depth = max_pullback_depth(cfg.system, g0, 16);
  for (int n : {1, 2, 4, 8, 16}) {
    if (n > depth) break;
    const MetricField gn = bochi_sequence(cfg.system, g0, n);
    const ObjectiveReport r = evaluate_objective(cfg.system, gn, weights);
    out << n;
    for (int k = 0; k < cfg.system.dim(); ++k)
      out << "," << format_double(r.s_partial[k]);
    out << "\n";
  }
  emit(out.str(), out_path);
  return 0;
}

// -- verify: the deterministic property suites --------------------------

struct SuiteResult {
  std::string name;
  bool passed;
  std::string detail;
};

SuiteResult suite_horn(std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < 1000; ++i) {
    Matrix a(2, 2), b(2, 2);
    do {
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          a(r, c) = rng.uniform(-2.0, 2.0);
          b(r, c) = rng.uniform(-2.0, 2.0);
        }
    } while (std::abs(a.determinant()) < 1e-3 || std::abs(b.determinant()) < 1e-3);
    const auto sab = spd::log_singular_values(a * b);
    const auto sum = spd::log_singular_values(a) + spd::log_singular_values(b);
    if (!spd::majorize_leq(sab, sum, false, 1e-8))
      return {"horn", false, "violation at trial " + std::to_string(i)};
  }
  return {"horn", true, "1000 random pairs"};
}

SuiteResult suite_majorization(std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < 200; ++i) {
    Vector v(2);
    v[0] = rng.uniform(0.0, 2.0);
    v[1] = v[0] - rng.uniform(0.0, 2.0);
    const LogSingularVector xi(v);
    if (!spd::majorize_leq(xi, xi)) return {"majorization", false, "reflexivity"};
  }
  return {"majorization", true, "reflexivity on 200 samples"};
}

Matrix random_spd(Rng& rng, int d) {
  Matrix v(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v(i, j) = rng.uniform(-1.0, 1.0);
  return spd::matrix_exp(spd::sym(v));
}

SuiteResult suite_barycenter(std::uint64_t seed) {
  Rng rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Matrix> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(random_spd(rng, 2));
    const Matrix bar = spd::barycenter(pts);
    Matrix g(2, 2);
    g << 1.0 + rng.uniform(), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
        1.0 + rng.uniform();
    std::vector<Matrix> moved;
    for (const Matrix& p : pts) moved.push_back(spd::gl_action(g, p));
    if ((spd::gl_action(g, bar) - spd::barycenter(moved)).norm() > 1e-8)
      return {"barycenter", false, "GL-equivariance violated"};
  }
  return {"barycenter", true, "GL-equivariance on 20 trials"};
}

SuiteResult suite_convexity(const RunConfig& cfg, const MeasureWeights& weights,
                            std::uint64_t seed) {
  const double off = MetricField::offset_for(cfg.system);
  for (int trial = 0; trial < 20; ++trial) {
    const MetricField a =
        random_field(cfg.grid_n, cfg.system.dim(), 0.8, seed + 2 * trial, off);
    const MetricField b =
        random_field(cfg.grid_n, cfg.system.dim(), 0.8, seed + 2 * trial + 1, off);
    if (!midpoint_convexity_check(cfg.system, a, b, weights))
      return {"convexity", false, "midpoint violation at trial " +
                                      std::to_string(trial)};
  }
  return {"convexity", true, "20 random geodesic pairs"};
}

SuiteResult suite_lipschitz(const RunConfig& cfg, const MeasureWeights& weights,
                            std::uint64_t seed) {
  const double off = MetricField::offset_for(cfg.system);
  for (int trial = 0; trial < 20; ++trial) {
    const MetricField a =
        random_field(cfg.grid_n, cfg.system.dim(), 1.0, seed + 100 + 2 * trial, off);
    const MetricField b =
        random_field(cfg.grid_n, cfg.system.dim(), 1.0, seed + 101 + 2 * trial, off);
    for (int k = 1; k <= cfg.system.dim(); ++k) {
      const LipschitzCheck chk = lipschitz_check(cfg.system, a, b, weights, k);
      if (chk.lhs > chk.rhs + 1e-8)
        return {"lipschitz", false, "violation at trial " + std::to_string(trial)};
    }
  }
  return {"lipschitz", true, "20 random pairs, all k"};
}

SuiteResult suite_bochi(const RunConfig& cfg, const MeasureWeights& weights) {
  if (!cfg.system.is_automorphism())
    return {"bochi", true, "skipped (system is not an automorphism)"};
  const MetricField g0 = MetricField::flat(cfg.grid_n, cfg.system.dim(), 0.0);
  const int depth = max_pullback_depth(cfg.system, g0, 8);
  std::string covered;
  for (int n : {1, 2, 4, 8}) {
    if (n > depth) break;
    covered += (covered.empty() ? "" : ",") + std::to_string(n);
    const MetricField gn = bochi_sequence(cfg.system, g0, n);
    for (std::size_t c = 0; c < gn.cell_count(); ++c) {
      const TorusPoint x = gn.sample_point(c);
      const auto lhs = sigma_at(cfg.system, gn, x);
      const auto rhs = spd::log_singular_values(
                           cfg.system.iterate_jacobian(x, n)) *
                       (1.0 / n);
      if (!spd::majorize_leq(lhs, rhs, false, 1e-7))
        return {"bochi", false, "inequality fails at N=" + std::to_string(n)};
    }
  }
  (void)weights;
  return {"bochi", true, "N in {" + covered + "} on every cell"};
}

SuiteResult suite_gradient(const RunConfig& cfg, const MeasureWeights& weights,
                           std::uint64_t seed) {
  const MetricField g = MetricField::flat(cfg.grid_n, cfg.system.dim(),
                                          MetricField::offset_for(cfg.system));
  try {
    const double err =
        verify_gradient(cfg.system, g, weights, 1, 5, 1e-5, seed);
    if (err > 1e-3)
      return {"gradient", false, "max relative error " + format_double(err)};
    return {"gradient", true, "max relative error " + format_double(err)};
  } catch (const SpectralGapViolated&) {
    return {"gradient", true, "skipped (no spectral gap at flat metric)"};
  }
}

int cmd_verify(const RunConfig& cfg, std::uint64_t seed,
               const std::string& suite_filter) {
  const MeasureWeights weights = make_weights(cfg);
  std::vector<SuiteResult> results;
  auto want = [&](const std::string& name) {
    return suite_filter.empty() || suite_filter == name;
  };
  if (want("horn")) results.push_back(suite_horn(seed));
  if (want("majorization")) results.push_back(suite_majorization(seed));
  if (want("barycenter")) results.push_back(suite_barycenter(seed));
  if (want("convexity")) results.push_back(suite_convexity(cfg, weights, seed));
  if (want("lipschitz")) results.push_back(suite_lipschitz(cfg, weights, seed));
  if (want("bochi")) results.push_back(suite_bochi(cfg, weights));
  if (want("gradient")) results.push_back(suite_gradient(cfg, weights, seed));
  if (results.empty()) throw ConfigError("unknown suite '" + suite_filter + "'");

  bool all_passed = true;
  for (const SuiteResult& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  ("
              << r.detail << ")\n";
    all_passed &= r.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged Lyapunov exponents via convex metric optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string metric_path;
  std::string suite_filter;
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  bool csv = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    cmd->add_option("--seed", seed_override, "seed override");
    cmd->add_option("--threads", threads, "worker thread cap")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* oracle = app.add_subcommand("oracle", "QR-method Lyapunov vector");
  add_common(oracle);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "objective value of a metric file");
  add_common(evaluate);
  evaluate->add_option("metric", metric_path, "metric JSON file")->required();
  evaluate->add_flag("--csv", csv, "emit CSV instead of JSON");
  CLI::App* optimize = app.add_subcommand("optimize", "geodesic descent run");
  add_common(optimize);
  CLI::App* verify = app.add_subcommand("verify", "property suites");
  add_common(verify);
  verify->add_option("--suite", suite_filter, "run a single suite by name");
  CLI::App* bochi =
      app.add_subcommand("bochi", "barycenter-of-pullbacks gap table");
  add_common(bochi);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = parse_config(config_path);
    if (seed_override) {
      cfg.oracle.seed = *seed_override;
      cfg.optimizer.seed = *seed_override;
    }
    const std::uint64_t verify_seed = seed_override.value_or(1);
    if (oracle->parsed()) return cmd_oracle(cfg, out_path);
    if (evaluate->parsed()) return cmd_evaluate(cfg, metric_path, out_path, csv);
    if (optimize->parsed()) return cmd_optimize(cfg, out_path);
    if (verify->parsed()) return cmd_verify(cfg, verify_seed, suite_filter);
    if (bochi->parsed()) return cmd_bochi(cfg, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
