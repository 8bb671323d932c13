#include "lyapopt/serialization.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lyapopt {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string metric_to_json(const MetricField& g) {
  json j;
  j["d"] = g.dim();
  j["n"] = g.resolution();
  j["offset"] = g.sample_offset();
  json cells = json::array();
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    json cell = json::array();
    for (int i = 0; i < g.dim(); ++i)
      for (int k = 0; k < g.dim(); ++k) cell.push_back(g[c](i, k));
    cells.push_back(std::move(cell));
  }
  j["cells"] = std::move(cells);
  return j.dump(2);
}

MetricField metric_from_json(const std::string& text) {
  const json j = json::parse(text);
  const int d = j.at("d").get<int>();
  const int n = j.at("n").get<int>();
  const double offset = j.value("offset", 0.0);
  const auto& cells = j.at("cells");
  std::vector<Matrix> values;
  values.reserve(cells.size());
  for (const auto& cell : cells) {
    if (static_cast<int>(cell.size()) != d * d)
      throw std::invalid_argument("cell entry count does not match d*d");
    Matrix m(d, d);
    int idx = 0;
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) m(i, k) = cell[idx++].get<double>();
    values.push_back(std::move(m));
  }
  return MetricField(n, d, std::move(values), offset);
}

void save_metric(const MetricField& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << metric_to_json(g) << "\n";
}

MetricField load_metric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return metric_from_json(ss.str());
}

std::string estimate_to_json(const LyapunovEstimate& est) {
  json j;
  j["lambda"] = std::vector<double>(
      est.lambda.values().data(),
      est.lambda.values().data() + est.lambda.dim());
  j["n_steps"] = est.n_steps;
  j["samples"] = est.samples;
  j["per_point_spread"] = est.per_point_spread;
  return j.dump(2);
}

std::string report_to_json(const ObjectiveReport& report) {
  json j;
  j["svec"] = std::vector<double>(report.svec.values().data(),
                                  report.svec.values().data() + report.svec.dim());
  j["s_partial"] = std::vector<double>(
      report.s_partial.data(), report.s_partial.data() + report.s_partial.size());
  if (report.has_oracle)
    j["gap_to_oracle"] = std::vector<double>(
        report.gap_to_oracle.data(),
        report.gap_to_oracle.data() + report.gap_to_oracle.size());
  return j.dump(2);
}

std::string report_to_csv(const ObjectiveReport& report) {
  std::ostringstream out;
  const int d = report.svec.dim();
  for (int k = 1; k <= d; ++k) out << (k > 1 ? "," : "") << "s_" << k;
  for (int k = 1; k <= d; ++k) out << ",gap_" << k;
  out << "\n";
  for (int k = 0; k < d; ++k)
    out << (k > 0 ? "," : "") << format_double(report.s_partial[k]);
  for (int k = 0; k < d; ++k)
    out << "," << format_double(report.has_oracle ? report.gap_to_oracle[k] : 0.0);
  out << "\n";
  return out.str();
}

std::string trace_to_csv(const std::vector<IterationRecord>& trace, int dim) {
  std::ostringstream out;
  out << "iter";
  for (int k = 1; k <= dim; ++k) out << ",s_" << k;
  out << ",step,grad_norm";
  for (int k = 1; k <= dim; ++k) out << ",gap_" << k;
  out << "\n";
  for (const IterationRecord& rec : trace) {
    out << rec.iter;
    for (int k = 0; k < dim; ++k) out << "," << format_double(rec.s_partial[k]);
    out << "," << format_double(rec.step) << "," << format_double(rec.grad_norm);
    for (int k = 0; k < dim; ++k)
      out << ","
          << format_double(rec.gap_to_oracle.size() == dim ? rec.gap_to_oracle[k]
                                                           : 0.0);
    out << "\n";
  }
  return out.str();
}

}  // namespace lyapopt
