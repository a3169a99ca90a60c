// Command-line front end for the reputation-measure library.
//
// Subcommands:
//   reproduce <table-id>   recompute a bundled reference table and check each
//                          cell against the recorded value
//   run <config-file>      evaluate the measures over a parameter sweep and
//                          write a CSV
//   compare <config-file>  cross-check the closed-form measures against a
//                          Monte Carlo run of the same configuration
//   price <config-file>    print the certificate pricing bounds for the
//                          configured market and policy
//
// Exit codes: 0 success, 1 a tolerance/consistency check failed, 2 bad
// configuration or usage.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "repsim/errors.hpp"
#include "repsim/experiment.hpp"
#include "repsim/insurance.hpp"
#include "repsim/tables.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_reproduce(const std::string& table_id, const repsim::ReproduceOptions& opts) {
  const repsim::ReproReport report = repsim::reproduce_table(table_id, opts);
  int outside = 0;
  for (const auto& cell : report.cells) {
    std::printf("%-7s %-28s %-24s computed=%-22.17g recorded=%-12g", cell.within ? "within" : "OUTSIDE",
                cell.label.c_str(), cell.measure.c_str(), cell.computed, cell.printed);
    std::printf(" tol=%g%s", cell.tolerance, cell.relative ? " (rel)" : " (abs)");
    if (cell.sim_mean) {
      std::printf(" sim=%.6g (stderr %.3g)", *cell.sim_mean, cell.sim_std_err ? *cell.sim_std_err : 0.0);
    }
    std::printf("\n");
    if (!cell.within) ++outside;
  }
  std::printf("%s: %zu cells, %zu within tolerance, %d outside (%.2f s)\n", report.table.c_str(),
              report.cells.size(), report.cells.size() - static_cast<size_t>(outside), outside,
              report.elapsed_s);
  return report.passed ? kExitOk : kExitCheckFailed;
}

// output_path resolution: absolute paths are used as-is; relative paths land
// under $REPSIM_OUTPUT_DIR when set, else under the current directory.
std::filesystem::path resolve_output(const std::string& output_path) {
  std::filesystem::path p(output_path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("REPSIM_OUTPUT_DIR")) {
    return std::filesystem::path(dir) / p;
  }
  return p;
}

int run_run(repsim::ExperimentConfig cfg) {
  std::cerr << repsim::resolved_parameter_log(cfg);
  const repsim::ExperimentResult result = repsim::run_experiment(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (cfg.output_path.empty()) {
    repsim::write_csv(std::cout, result);
  } else {
    const std::filesystem::path out = resolve_output(cfg.output_path);
    if (out.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(out.parent_path(), ec);
    }
    std::ofstream file(out);
    if (!file) {
      std::cerr << "error: cannot open output file " << out << "\n";
      return kExitConfig;
    }
    repsim::write_csv(file, result);
    std::cerr << "wrote " << result.rows.size() << " rows to " << out.string() << "\n";
  }
  return kExitOk;
}

int run_compare(const repsim::ExperimentConfig& cfg) {
  std::cerr << repsim::resolved_parameter_log(cfg);
  const repsim::ComparisonReport report = repsim::compare_measures(cfg);
  for (const auto& row : report.rows) {
    std::printf("%-32s analytic=%-22.17g sim=%-22.17g stderr=%-12.6g z=%-10.4g %s\n",
                row.measure.c_str(), row.analytic, row.sim_mean, row.sim_std_err, row.z,
                row.flagged ? "DISAGREES" : "ok");
  }
  std::printf("%s: %zu measures, %s\n", "comparison", report.rows.size(),
              report.passed ? "all within 3 standard errors" : "disagreement detected");
  return report.passed ? kExitOk : kExitCheckFailed;
}

int run_price(const repsim::ExperimentConfig& cfg, double epsilon) {
  if (!cfg.policy) {
    std::cerr << "error: price requires a policy.* block in the configuration\n";
    return kExitConfig;
  }
  std::cerr << repsim::resolved_parameter_log(cfg);
  for (const auto& w : repsim::validate_market(cfg.market)) std::cerr << "warning: " << w << "\n";
  for (const auto& w : repsim::validate_policy(*cfg.policy, cfg.market)) {
    std::cerr << "warning: " << w << "\n";
  }
  const double price_cap = repsim::max_insurance_price(cfg.market, *cfg.policy);
  const double deposit = repsim::min_deposit_threshold(epsilon, cfg.market, *cfg.policy);
  const double clearing = repsim::min_clearing_time(cfg.market);
  std::printf("max_insurance_price = %s\n", format_double(price_cap).c_str());
  std::printf("min_deposit_threshold = %s (epsilon = %g)\n", format_double(deposit).c_str(), epsilon);
  std::printf("min_clearing_time_days = %s\n", format_double(clearing).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-form and Monte Carlo performance measures for a feedback-based online market"};
  app.require_subcommand(1);

  std::string table_id;
  bool simulate = false;
  long long runs = 10000;
  std::optional<std::uint64_t> seed;
  auto* reproduce = app.add_subcommand("reproduce", "recompute a bundled reference table");
  reproduce->add_option("table", table_id, "table id: " + [] {
    std::string ids;
    for (const auto& id : repsim::reproduce_table_ids()) {
      if (!ids.empty()) ids += ", ";
      ids += id;
    }
    return ids;
  }())->required();
  reproduce->add_flag("--simulate", simulate, "also run Monte Carlo per cell (informational columns)");
  reproduce->add_option("--runs", runs, "Monte Carlo runs per cell when --simulate is set");
  reproduce->add_option("--seed", seed, "Monte Carlo seed when --simulate is set");

  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "evaluate measures over a parameter sweep, write CSV");
  run->add_option("config", run_config, "experiment configuration file")->required();
  run->add_option("--seed", run_seed, "override the configured simulation seed");

  std::string compare_config;
  std::optional<std::uint64_t> compare_seed;
  auto* compare = app.add_subcommand("compare", "cross-check closed forms against simulation");
  compare->add_option("config", compare_config, "experiment configuration file")->required();
  compare->add_option("--seed", compare_seed, "override the configured simulation seed");

  std::string price_config;
  std::optional<double> price_epsilon;
  auto* price = app.add_subcommand("price", "print certificate pricing bounds");
  price->add_option("config", price_config, "experiment configuration file")->required();
  price->add_option("--epsilon", price_epsilon, "deposit exhaustion probability bound (default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*reproduce) {
      repsim::ReproduceOptions opts;
      opts.simulate = simulate;
      opts.runs = runs;
      opts.seed = seed;
      return run_reproduce(table_id, opts);
    }
    if (*run) {
      repsim::ExperimentConfig cfg = repsim::load_experiment_config(run_config);
      if (run_seed) cfg.sim.seed = *run_seed;
      return run_run(std::move(cfg));
    }
    if (*compare) {
      repsim::ExperimentConfig cfg = repsim::load_experiment_config(compare_config);
      if (compare_seed) cfg.sim.seed = *compare_seed;
      return run_compare(cfg);
    }
    if (*price) {
      repsim::ExperimentConfig cfg = repsim::load_experiment_config(price_config);
      return run_price(cfg, price_epsilon.value_or(cfg.epsilon));
    }
  } catch (const repsim::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const repsim::horizon_error& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const repsim::divergence_error& e) {
    std::cerr << "analytic error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitConfig;
}
