#pragma once

// JSON/CSV interchange: metric field records, objective reports,
// Lyapunov estimates and optimization traces. JSON is the default;
// CSV columns use 17 significant digits, '.' decimal, no locale.

#include "lyapopt/met_oracle.hpp"
#include "lyapopt/objective.hpp"
#include "lyapopt/optimizer.hpp"

#include <string>

namespace lyapopt {

/// {d, n, offset, cells: row-major per-cell matrices in lexicographic order}
std::string metric_to_json(const MetricField& g);
MetricField metric_from_json(const std::string& text);

void save_metric(const MetricField& g, const std::string& path);
MetricField load_metric(const std::string& path);

std::string estimate_to_json(const LyapunovEstimate& est);
std::string report_to_json(const ObjectiveReport& report);

/// One-row CSV: s_1..s_d, gap_1..gap_d.
std::string report_to_csv(const ObjectiveReport& report);

/// One row per iteration: iter, s_1..s_d, step, grad_norm, gap_1..gap_d.
std::string trace_to_csv(const std::vector<IterationRecord>& trace, int dim);

std::string format_double(double v);

}  // namespace lyapopt
