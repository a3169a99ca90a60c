#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "repsim/insurance.hpp"
#include "repsim/market.hpp"
#include "repsim/simulator.hpp"

namespace repsim {

// One swept parameter: a dotted field name (market.* or policy.*) and the
// values it takes. An experiment runs the Cartesian product of its axes, the
// first axis varying slowest.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct ExperimentConfig {
  MarketParams market;
  std::optional<InsurancePolicy> policy;
  SimConfig sim;
  std::vector<SweepAxis> sweep;
  bool simulate = false;      // fill the sim columns
  bool emit_runtime = false;  // fill runtime_s (off keeps output byte-stable)
  double epsilon = 0.01;      // deposit sizing confidence for pricing rows
  std::string output_path;
};

// Parses the flat dotted key = value format (lines of `section.field = value`,
// `#` comments, `sweep.<field> = v1,v2,...`). Unknown keys and malformed
// values raise config_error naming the offender.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

// Every resolved parameter, one per line, for the run log.
std::string resolved_parameter_log(const ExperimentConfig& config);

struct ResultRow {
  std::vector<double> param_values;  // aligned with ExperimentResult::param_names
  std::string measure;
  std::optional<double> analytic;
  std::optional<double> sim_mean;
  std::optional<double> sim_std_err;
  std::optional<double> runtime_s;
};

struct ExperimentResult {
  std::vector<std::string> param_names;
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;  // advisory, never a failure
};

// Evaluates every sweep point: the four baseline measures, the insured
// measures and pricing bounds when a policy is configured, and Monte Carlo
// columns when simulate is on. A deposit below its sizing bound produces a
// warning row and a warning string, not a failure.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV layout: param columns, then measure,analytic,sim_mean,sim_stderr,
// runtime_s. 17 significant digits; missing fields stay empty.
void write_csv(std::ostream& out, const ExperimentResult& result);

// %.17g rendering shared by the CSV writer and the logs.
std::string format_value(double v);

// Distance between analytic and simulated values in standard-error units.
// Agreement within 1e-9 absolute (including two infinities of the same sign)
// counts as zero; a larger gap with zero standard error is infinite.
double sigma_distance(double analytic, double sim_mean, double sim_std_err);

struct ComparisonRow {
  std::string measure;
  double analytic = 0.0;
  double sim_mean = 0.0;
  double sim_std_err = 0.0;
  double z = 0.0;
  bool flagged = false;  // z above 3
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  bool passed = false;
};

// Runs the analytic and the Monte Carlo path on the config's base point and
// reports the sigma distance per measure; the regime picks baseline or
// insured measures.
ComparisonReport compare_measures(const ExperimentConfig& config);

}  // namespace repsim
