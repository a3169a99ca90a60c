#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repsim/insurance.hpp"
#include "repsim/market.hpp"

namespace repsim {

// The library ships four reference result tables for a fixed marketplace
// configuration; reproduce_table recomputes them and checks each cell against
// the published value at that table's tolerance.
//
//   table2  expected ramp-up days over arrival rate x reputation threshold
//   table3  drop-out probability over adoption probability x threshold
//   table4  seller and operator gains over adoption probability x threshold
//   table5  baseline vs certified measures over the reputation threshold

struct ReproduceOptions {
  bool simulate = false;  // add Monte Carlo columns next to the closed forms
  long long runs = 10000;
  std::optional<std::uint64_t> seed;
};

struct ReproCell {
  std::string label;  // the cell's parameter assignments
  std::string measure;
  double computed = 0.0;
  double printed = 0.0;   // published reference value
  double tolerance = 0.0;
  bool relative = false;  // tolerance is a fraction of the printed value
  bool within = false;
  std::optional<double> sim_mean;
  std::optional<double> sim_std_err;
};

struct ReproReport {
  std::string table;
  std::vector<ReproCell> cells;
  bool passed = false;  // every cell within tolerance
  double elapsed_s = 0.0;
};

// Marketplace configuration the reference tables share; individual tables
// vary the arrival rate, the adoption probability and the threshold.
MarketParams reference_market();

// Certificate terms used by the certified columns of table5.
InsurancePolicy reference_policy();

std::vector<std::string> reproduce_table_ids();

ReproReport reproduce_table(const std::string& table_id, const ReproduceOptions& opts = {});

}  // namespace repsim
