#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "repsim/errors.hpp"
#include "repsim/experiment.hpp"
#include "test_configs.hpp"

using repsim::ExperimentConfig;
using repsim::ExperimentResult;
using repsim::parse_experiment_config;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

const char* kOddMarketText =
    "market.price = 1.6\n"
    "market.cost = 0.8\n"
    "market.fee_fraction = 0.0625\n"
    "market.advertised_quality = 0.8\n"
    "market.intrinsic_quality = 0.8\n"
    "market.critical_factor = 0.1\n"
    "market.discount_beta = 0.5\n"
    "market.consistency_theta = 0.9\n"
    "market.reputation_threshold = 60\n"
    "market.arrival_before = 15\n"
    "market.arrival_after = 40\n"
    "market.adoption = tabulated\n"
    "market.adoption_before = 0.02\n"
    "market.adoption_after = 0.08\n"
    "market.slot_length = 1.5\n"
    "market.patience = 90\n"
    "market.gain_discount = 0.95\n"
    "market.shipment_cost = 0.5\n";

}  // namespace

TEST_CASE("configuration round-trips every field") {
  std::string text = kOddMarketText;
  text +=
      "policy.price = 10\n"
      "policy.duration = 40.7\n"
      "policy.clearing = 1.5\n"
      "policy.deposit = 5000\n"
      "policy.revoke_threshold = 50\n"
      "sim.runs = 1234\n"
      "sim.seed = 99\n"
      "sim.regime = insured\n"
      "sim.analytic_tail = false\n"
      "simulate = true\n"
      "emit_runtime = true\n"
      "epsilon = 0.02\n"
      "output_path = out.csv  # trailing comment\n"
      "sweep.market.reputation_threshold = 40, 60\n";
  const ExperimentConfig cfg = parse(text);
  CHECK(cfg.market.cost == 0.8);
  CHECK(cfg.market.reputation_threshold == 60);
  CHECK(cfg.market.slot_length == 1.5);
  CHECK(cfg.market.adoption.prob_reputable == 0.08);
  REQUIRE(cfg.policy.has_value());
  CHECK(cfg.policy->duration == 40.7);
  CHECK(cfg.sim.runs == 1234);
  CHECK(cfg.sim.seed == 99);
  CHECK(cfg.sim.regime == repsim::Regime::Insured);
  CHECK_FALSE(cfg.sim.analytic_tail);
  CHECK(cfg.simulate);
  CHECK(cfg.emit_runtime);
  CHECK(cfg.epsilon == 0.02);
  CHECK(cfg.output_path == "out.csv");
  REQUIRE(cfg.sweep.size() == 1);
  CHECK(cfg.sweep[0].name == "market.reputation_threshold");
  CHECK(cfg.sweep[0].values == std::vector<double>{40.0, 60.0});

  const std::string log = repsim::resolved_parameter_log(cfg);
  CHECK(log.find("market.cost = 0.8") != std::string::npos);
  CHECK(log.find("policy.duration = 40.7") != std::string::npos);
  CHECK(log.find("sweep.market.reputation_threshold") != std::string::npos);
}

TEST_CASE("configuration errors name the offender") {
  auto error_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const repsim::config_error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("market.prize = 3\n").find("market.prize") != std::string::npos);
  CHECK(error_of("market.price = abc\n").find("market.price") != std::string::npos);
  CHECK(error_of("market.reputation_threshold = 2.5\n").find("reputation_threshold") !=
        std::string::npos);
  CHECK(error_of("sim.regime = sideways\n").find("sideways") != std::string::npos);
  CHECK(error_of("market.adoption = magic\n").find("magic") != std::string::npos);
  // A policy sweep without a policy block cannot be resolved.
  CHECK(error_of(std::string(kOddMarketText) + "sweep.policy.duration = 1,2\n")
            .find("policy") != std::string::npos);
  // Insured simulation requires certificate terms.
  CHECK(error_of(std::string(kOddMarketText) + "sim.regime = insured\n").find("policy") !=
        std::string::npos);
  // The same axis cannot be swept twice.
  CHECK(error_of(std::string(kOddMarketText) +
                 "sweep.market.patience = 90,180\nsweep.market.patience = 90\n")
            .find("patience") != std::string::npos);
  CHECK_THROWS_AS(repsim::load_experiment_config("/nonexistent/path.conf"),
                  repsim::config_error);
}

TEST_CASE("sweeps expand in row-major order and produce stable csv") {
  std::string text = kOddMarketText;
  text +=
      "sweep.market.reputation_threshold = 40, 60\n"
      "sweep.market.adoption_before = 0.02, 0.03\n";
  const ExperimentConfig cfg = parse(text);
  const ExperimentResult result = repsim::run_experiment(cfg);

  REQUIRE(result.param_names ==
          std::vector<std::string>{"market.reputation_threshold", "market.adoption_before"});
  REQUIRE(result.rows.size() == 16);  // 4 sweep points x 4 measures
  CHECK(result.rows[0].param_values == std::vector<double>{40.0, 0.02});
  CHECK(result.rows[0].measure == "ramp_up_days");
  CHECK(result.rows[4].param_values == std::vector<double>{40.0, 0.03});  // last axis fastest
  CHECK(result.rows[8].param_values == std::vector<double>{60.0, 0.02});
  for (const auto& row : result.rows) {
    CHECK_FALSE(row.sim_mean.has_value());  // simulate off
    CHECK_FALSE(row.runtime_s.has_value());
  }

  std::ostringstream csv_a, csv_b;
  repsim::write_csv(csv_a, result);
  repsim::write_csv(csv_b, repsim::run_experiment(cfg));
  CHECK(csv_a.str() == csv_b.str());  // byte-stable reruns
  const std::string header = csv_a.str().substr(0, csv_a.str().find('\n'));
  CHECK(header ==
        "market.reputation_threshold,market.adoption_before,measure,analytic,sim_mean,"
        "sim_stderr,runtime_s");
}

TEST_CASE("a policy block adds certified measures, pricing rows and the sizing warning") {
  std::string text = kOddMarketText;
  text +=
      "policy.price = 10\n"
      "policy.duration = 10\n"
      "policy.clearing = 1.5\n"
      "policy.deposit = 1\n"  // far below the sizing bound: expect a warning row
      "policy.revoke_threshold = 0.5\n";
  const ExperimentConfig cfg = parse(text);
  const ExperimentResult result = repsim::run_experiment(cfg);

  bool saw_warning_row = false, saw_price = false, saw_insured_gain = false;
  for (const auto& row : result.rows) {
    if (row.measure == "warning_deposit_below_bound") saw_warning_row = true;
    if (row.measure == "max_insurance_price") saw_price = true;
    if (row.measure == "insured_seller_gain") {
      saw_insured_gain = true;
      CHECK(*row.analytic == doctest::Approx(24.043824774974638).epsilon(kQuadRel));
    }
  }
  CHECK(saw_warning_row);
  CHECK(saw_price);
  CHECK(saw_insured_gain);
  REQUIRE_FALSE(result.warnings.empty());
  CHECK(result.warnings.front().find("deposit") != std::string::npos);
}

TEST_CASE("simulate fills the sim columns") {
  std::string text = kOddMarketText;
  text +=
      "sim.runs = 400\n"
      "sim.seed = 12\n"
      "simulate = true\n";
  const ExperimentResult result = repsim::run_experiment(parse(text));
  REQUIRE(result.rows.size() == 4);
  for (const auto& row : result.rows) {
    REQUIRE(row.sim_mean.has_value());
    REQUIRE(row.sim_std_err.has_value());
  }
  // drop_out row: closed form vs simulation agree loosely even at 400 runs
  CHECK(*result.rows[1].analytic == doctest::Approx(*result.rows[1].sim_mean).epsilon(1e-3));
}

TEST_CASE("value formatting keeps full precision") {
  CHECK(repsim::format_value(0.1) == "0.10000000000000001");
  CHECK(repsim::format_value(3.0) == "3");
  CHECK(repsim::format_value(1485.0000000000025) == "1485.0000000000025");
}

TEST_CASE("sigma distance semantics") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(repsim::sigma_distance(1.0, 1.0, 0.0) == 0.0);
  CHECK(repsim::sigma_distance(1.0, 2.0, 0.5) == doctest::Approx(2.0));
  CHECK(repsim::sigma_distance(inf, inf, 0.0) == 0.0);  // both diverge: agreement
  CHECK(repsim::sigma_distance(1e-123, 0.0, 0.0) == 0.0);  // below the absolute floor
  CHECK(repsim::sigma_distance(1.0, 1.5, 0.0) == inf);  // a real gap with no noise
  CHECK(repsim::sigma_distance(std::nan(""), 1.0, 1.0) == inf);
  CHECK(repsim::sigma_distance(5.0, 4.0, 0.1) == doctest::Approx(10.0));
}

TEST_CASE("comparison flags corruption and passes a faithful pairing") {
  // The reference market at adoption 0.03 keeps every measure away from its
  // degenerate limit, so all four standard errors are healthy.
  std::string text =
      "market.price = 1.6\nmarket.cost = 0.5\nmarket.fee_fraction = 0.0625\n"
      "market.reputation_threshold = 100\nmarket.arrival_before = 20\n"
      "market.arrival_after = 50\nmarket.adoption = tabulated\n"
      "market.adoption_before = 0.03\nmarket.adoption_after = 0.1\n"
      "market.slot_length = 3\nmarket.patience = 180\nmarket.gain_discount = 0.99\n"
      "market.shipment_cost = 0.5\n";
  text += "sim.runs = 2000\nsim.seed = 3003\n";
  const ExperimentConfig cfg = parse(text);
  const repsim::ComparisonReport report = repsim::compare_measures(cfg);
  REQUIRE(report.rows.size() == 4);
  CHECK(report.passed);
  for (const auto& row : report.rows) CHECK(row.z <= 3.0);

  // A corrupted closed form must be caught by the same machinery.
  const double z = repsim::sigma_distance(report.rows[0].analytic * 1.02,
                                          report.rows[0].sim_mean, report.rows[0].sim_std_err);
  CHECK(z > 3.0);
}

TEST_CASE("zero-rate markets compare as agreeing divergence") {
  std::string text = kOddMarketText;
  text += "sim.runs = 200\nsim.seed = 1\n";
  ExperimentConfig cfg = parse(text);
  cfg.market.adoption.prob_average = 0.0;
  const repsim::ComparisonReport report = repsim::compare_measures(cfg);
  CHECK(report.passed);  // infinite ramp on both sides counts as agreement
}

TEST_CASE("comparing the adversarial regime is rejected") {
  std::string text = kOddMarketText;
  text +=
      "policy.price = 10\npolicy.duration = 10\npolicy.clearing = 1.5\n"
      "policy.deposit = 5000\npolicy.revoke_threshold = 50\n"
      "sim.regime = insured_adversarial\nsim.adversarial_advertised_quality = 1.0\n";
  const ExperimentConfig cfg = parse(text);
  CHECK_THROWS_AS(repsim::compare_measures(cfg), repsim::config_error);
}
