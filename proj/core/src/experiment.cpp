#include "repsim/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "repsim/baseline_analytics.hpp"
#include "repsim/errors.hpp"

namespace repsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid numeric value '" + text + "' for key '" + key + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  const long long r = std::llround(v);
  if (std::fabs(v - static_cast<double>(r)) > 1e-9)
    throw config_error("key '" + key + "' needs an integer, got '" + text + "'");
  return r;
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid seed '" + text + "' for key '" + key + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw config_error("key '" + key + "' needs true or false, got '" + text + "'");
}

using MarketSetter = std::function<void(MarketParams&, double)>;
using PolicySetter = std::function<void(InsurancePolicy&, double)>;

const std::map<std::string, MarketSetter>& market_fields() {
  static const std::map<std::string, MarketSetter> fields = {
      {"market.price", [](MarketParams& m, double v) { m.price = v; }},
      {"market.cost", [](MarketParams& m, double v) { m.cost = v; }},
      {"market.fee_fraction", [](MarketParams& m, double v) { m.fee_fraction = v; }},
      {"market.advertised_quality", [](MarketParams& m, double v) { m.advertised_quality = v; }},
      {"market.intrinsic_quality", [](MarketParams& m, double v) { m.intrinsic_quality = v; }},
      {"market.critical_factor", [](MarketParams& m, double v) { m.critical_factor = v; }},
      {"market.discount_beta", [](MarketParams& m, double v) { m.discount_beta = v; }},
      {"market.consistency_theta", [](MarketParams& m, double v) { m.consistency_theta = v; }},
      {"market.reputation_threshold",
       [](MarketParams& m, double v) {
         const long long r = std::llround(v);
         if (std::fabs(v - static_cast<double>(r)) > 1e-9)
           throw config_error("market.reputation_threshold needs an integer value");
         m.reputation_threshold = r;
       }},
      {"market.arrival_before", [](MarketParams& m, double v) { m.arrival_before = v; }},
      {"market.arrival_after", [](MarketParams& m, double v) { m.arrival_after = v; }},
      {"market.slot_length", [](MarketParams& m, double v) { m.slot_length = v; }},
      {"market.patience", [](MarketParams& m, double v) { m.patience = v; }},
      {"market.gain_discount", [](MarketParams& m, double v) { m.gain_discount = v; }},
      {"market.shipment_cost", [](MarketParams& m, double v) { m.shipment_cost = v; }},
      {"market.adoption_before", [](MarketParams& m, double v) { m.adoption.prob_average = v; }},
      {"market.adoption_after", [](MarketParams& m, double v) { m.adoption.prob_reputable = v; }},
  };
  return fields;
}

const std::map<std::string, PolicySetter>& policy_fields() {
  static const std::map<std::string, PolicySetter> fields = {
      {"policy.price", [](InsurancePolicy& p, double v) { p.price = v; }},
      {"policy.duration", [](InsurancePolicy& p, double v) { p.duration = v; }},
      {"policy.clearing", [](InsurancePolicy& p, double v) { p.clearing = v; }},
      {"policy.deposit", [](InsurancePolicy& p, double v) { p.deposit = v; }},
      {"policy.revoke_threshold", [](InsurancePolicy& p, double v) { p.revoke_threshold = v; }},
  };
  return fields;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Baseline: return "baseline";
    case Regime::Insured: return "insured";
    case Regime::InsuredAdversarial: return "insured_adversarial";
  }
  return "baseline";
}

void assign_scalar(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (auto it = market_fields().find(key); it != market_fields().end()) {
    it->second(cfg.market, parse_double(key, value));
    return;
  }
  if (key == "market.adoption") {
    if (value == "tabulated")
      cfg.market.adoption.model = AdoptionModel::Tabulated;
    else if (value == "functional")
      cfg.market.adoption.model = AdoptionModel::Functional;
    else
      throw config_error("key 'market.adoption' must be tabulated or functional, got '" + value +
                         "'");
    return;
  }
  if (auto it = policy_fields().find(key); it != policy_fields().end()) {
    if (!cfg.policy) cfg.policy.emplace();
    it->second(*cfg.policy, parse_double(key, value));
    return;
  }
  if (key == "sim.runs") {
    cfg.sim.runs = parse_integer(key, value);
    return;
  }
  if (key == "sim.seed") {
    cfg.sim.seed = parse_seed(key, value);
    return;
  }
  if (key == "sim.horizon_slots") {
    cfg.sim.horizon_slots = parse_integer(key, value);
    return;
  }
  if (key == "sim.regime") {
    if (value == "baseline")
      cfg.sim.regime = Regime::Baseline;
    else if (value == "insured")
      cfg.sim.regime = Regime::Insured;
    else if (value == "insured_adversarial")
      cfg.sim.regime = Regime::InsuredAdversarial;
    else
      throw config_error(
          "key 'sim.regime' must be baseline, insured or insured_adversarial, got '" + value +
          "'");
    return;
  }
  if (key == "sim.adversarial_advertised_quality") {
    cfg.sim.adversarial_advertised_quality = parse_double(key, value);
    return;
  }
  if (key == "sim.analytic_tail") {
    cfg.sim.analytic_tail = parse_bool(key, value);
    return;
  }
  if (key == "simulate") {
    cfg.simulate = parse_bool(key, value);
    return;
  }
  if (key == "emit_runtime") {
    cfg.emit_runtime = parse_bool(key, value);
    return;
  }
  if (key == "epsilon") {
    cfg.epsilon = parse_double(key, value);
    return;
  }
  if (key == "output_path") {
    cfg.output_path = value;
    return;
  }
  throw config_error("unknown configuration key '" + key + "'");
}

void add_sweep_axis(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string field = key.substr(6);
  if (market_fields().count(field) == 0 && policy_fields().count(field) == 0)
    throw config_error("sweep entry '" + key +
                       "' does not name a numeric market or policy field");
  for (const auto& axis : cfg.sweep)
    if (axis.name == field) throw config_error("duplicate sweep entry '" + key + "'");
  SweepAxis axis;
  axis.name = field;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw config_error("empty value in sweep entry '" + key + "'");
    axis.values.push_back(parse_double(key, item));
  }
  if (axis.values.empty()) throw config_error("sweep entry '" + key + "' has no values");
  cfg.sweep.push_back(std::move(axis));
}

void apply_axis(ExperimentConfig& point, const std::string& name, double value) {
  if (auto it = market_fields().find(name); it != market_fields().end()) {
    it->second(point.market, value);
    return;
  }
  if (auto it = policy_fields().find(name); it != policy_fields().end()) {
    it->second(*point.policy, value);
    return;
  }
  throw config_error("unknown sweep field '" + name + "'");
}

std::string point_prefix(const std::vector<std::string>& names, const std::vector<double>& vals) {
  if (names.empty()) return "";
  std::string out = "[";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i] + "=" + format_value(vals[i]);
  }
  out += "] ";
  return out;
}

double inf_on_divergence(const std::function<double()>& f) {
  try {
    return f();
  } catch (const divergence_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line_no) + " is not a key = value pair: '" +
                         text + "'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw config_error("line " + std::to_string(line_no) + " has an empty key");
    if (value.empty())
      throw config_error("key '" + key + "' has an empty value (line " +
                         std::to_string(line_no) + ")");
    if (key.rfind("sweep.", 0) == 0)
      add_sweep_axis(cfg, key, value);
    else
      assign_scalar(cfg, key, value);
  }
  for (const auto& axis : cfg.sweep)
    if (axis.name.rfind("policy.", 0) == 0 && !cfg.policy)
      throw config_error("sweep entry 'sweep." + axis.name +
                         "' requires a policy block in the same config");
  if (cfg.sim.regime != Regime::Baseline && !cfg.policy)
    throw config_error(std::string("sim.regime = ") + regime_name(cfg.sim.regime) +
                       " requires a policy block");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open configuration file '" + path + "'");
  return parse_experiment_config(in);
}

std::string resolved_parameter_log(const ExperimentConfig& c) {
  std::ostringstream out;
  auto put = [&](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
  auto putd = [&](const std::string& k, double v) { put(k, format_value(v)); };
  const MarketParams& m = c.market;
  putd("market.price", m.price);
  putd("market.cost", m.cost);
  putd("market.fee_fraction", m.fee_fraction);
  putd("market.advertised_quality", m.advertised_quality);
  putd("market.intrinsic_quality", m.intrinsic_quality);
  putd("market.critical_factor", m.critical_factor);
  putd("market.discount_beta", m.discount_beta);
  putd("market.consistency_theta", m.consistency_theta);
  put("market.reputation_threshold", std::to_string(m.reputation_threshold));
  putd("market.arrival_before", m.arrival_before);
  putd("market.arrival_after", m.arrival_after);
  putd("market.slot_length", m.slot_length);
  putd("market.patience", m.patience);
  putd("market.gain_discount", m.gain_discount);
  putd("market.shipment_cost", m.shipment_cost);
  put("market.adoption",
      m.adoption.model == AdoptionModel::Tabulated ? "tabulated" : "functional");
  putd("market.adoption_before", m.adoption.prob_average);
  putd("market.adoption_after", m.adoption.prob_reputable);
  if (c.policy) {
    putd("policy.price", c.policy->price);
    putd("policy.duration", c.policy->duration);
    putd("policy.clearing", c.policy->clearing);
    putd("policy.deposit", c.policy->deposit);
    putd("policy.revoke_threshold", c.policy->revoke_threshold);
  } else {
    put("policy", "none");
  }
  put("sim.runs", std::to_string(c.sim.runs));
  put("sim.seed", std::to_string(c.sim.seed));
  put("sim.horizon_slots", std::to_string(c.sim.horizon_slots));
  put("sim.regime", regime_name(c.sim.regime));
  putd("sim.adversarial_advertised_quality", c.sim.adversarial_advertised_quality);
  put("sim.analytic_tail", c.sim.analytic_tail ? "true" : "false");
  put("simulate", c.simulate ? "true" : "false");
  put("emit_runtime", c.emit_runtime ? "true" : "false");
  putd("epsilon", c.epsilon);
  put("output_path", c.output_path.empty() ? "(stdout)" : c.output_path);
  for (const auto& axis : c.sweep) {
    std::string vals;
    for (std::size_t i = 0; i < axis.values.size(); ++i) {
      if (i) vals += ",";
      vals += format_value(axis.values[i]);
    }
    put("sweep." + axis.name, vals);
  }
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  for (const auto& axis : config.sweep) result.param_names.push_back(axis.name);

  std::vector<std::size_t> idx(config.sweep.size(), 0);
  bool done = false;
  while (!done) {
    std::vector<double> vals(config.sweep.size());
    for (std::size_t i = 0; i < config.sweep.size(); ++i)
      vals[i] = config.sweep[i].values[idx[i]];
    const std::string prefix = point_prefix(result.param_names, vals);

    ExperimentConfig pt = config;
    for (std::size_t i = 0; i < config.sweep.size(); ++i)
      apply_axis(pt, result.param_names[i], vals[i]);

    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& w : validate_market(pt.market)) result.warnings.push_back(prefix + w);
    if (pt.policy)
      for (const auto& w : validate_policy(*pt.policy, pt.market))
        result.warnings.push_back(prefix + w);

    std::vector<ResultRow> rows;
    rows.reserve(16);
    auto add = [&](const std::string& measure, std::optional<double> analytic) -> std::size_t {
      ResultRow r;
      r.param_values = vals;
      r.measure = measure;
      r.analytic = analytic;
      rows.push_back(std::move(r));
      return rows.size() - 1;
    };

    const MarketParams& mk = pt.market;
    const double ramp = inf_on_divergence([&] { return expected_ramp_up_time(mk); });
    const double drop = drop_out_probability(mk);
    const double count =
        inf_on_divergence([&] { return detail::discounted_transaction_count(mk, {}); });
    const BaselineMeasures base = detail::scale_gains(ramp, drop, count, mk);
    const std::size_t i_ramp = add("ramp_up_days", ramp);
    const std::size_t i_drop = add("drop_out_probability", drop);
    const std::size_t i_gs = add("seller_gain", base.seller_gain);
    const std::size_t i_ge = add("operator_gain", base.operator_gain);

    std::size_t i_iramp = 0, i_idrop = 0, i_igs = 0, i_ige = 0;
    if (pt.policy) {
      const InsurancePolicy& pol = *pt.policy;
      InsuredMeasures ins;
      ins.ramp_up = inf_on_divergence([&] { return insured_ramp_up_time(mk, pol); });
      ins.drop_out = insured_drop_out_probability(mk, pol);
      const double icount =
          inf_on_divergence([&] { return insured_long_term_profit(mk, pol).value; });
      // Reuse the exact seller-to-operator scaling on the insured side.
      const double unit = mk.unit_gain();
      ins.seller_gain = icount;
      ins.operator_gain = unit != 0.0 ? (mk.fee() / unit) * icount : 0.0;
      i_iramp = add("insured_ramp_up_days", ins.ramp_up);
      i_idrop = add("insured_drop_out_probability", ins.drop_out);
      i_igs = add("insured_seller_gain", ins.seller_gain);
      i_ige = add("insured_operator_gain", ins.operator_gain);

      const double price_cap = inf_on_divergence([&] { return max_insurance_price(mk, pol); });
      const double deposit_bound = min_deposit_threshold(pt.epsilon, mk, pol);
      add("max_insurance_price", price_cap);
      add("min_deposit_threshold", deposit_bound);
      add("min_clearing_time_days", min_clearing_time(mk));
      if (pol.deposit < deposit_bound) {
        add("warning_deposit_below_bound", deposit_bound);
        result.warnings.push_back(prefix + "policy deposit " + format_value(pol.deposit) +
                                  " is below the sizing bound " + format_value(deposit_bound) +
                                  " for epsilon = " + format_value(pt.epsilon));
      }
    }

    if (config.simulate) {
      SimConfig sc = pt.sim;
      sc.regime = Regime::Baseline;
      const SimMeasures mb = monte_carlo_measures(mk, sc);
      auto fill = [&](std::size_t i, const EstimateWithCI& e) {
        rows[i].sim_mean = e.mean;
        rows[i].sim_std_err = e.std_err;
      };
      fill(i_ramp, mb.ramp_up);
      fill(i_drop, mb.drop_out);
      fill(i_gs, mb.seller_gain);
      fill(i_ge, mb.operator_gain);
      if (pt.policy) {
        SimConfig si = pt.sim;
        si.policy = *pt.policy;
        si.regime = pt.sim.regime == Regime::InsuredAdversarial ? Regime::InsuredAdversarial
                                                                : Regime::Insured;
        const SimMeasures mi = monte_carlo_measures(mk, si);
        fill(i_iramp, mi.ramp_up);
        fill(i_idrop, mi.drop_out);
        fill(i_igs, mi.seller_gain);
        fill(i_ige, mi.operator_gain);
      }
    }

    if (config.emit_runtime) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (auto& r : rows) r.runtime_s = secs;
    }
    for (auto& r : rows) result.rows.push_back(std::move(r));

    // Odometer over the sweep axes, last axis fastest.
    done = true;
    for (std::size_t i = config.sweep.size(); i-- > 0;) {
      if (++idx[i] < config.sweep[i].values.size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (config.sweep.empty()) done = true;
  }
  return result;
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
  std::string header;
  for (const auto& name : result.param_names) header += name + ",";
  header += "measure,analytic,sim_mean,sim_stderr,runtime_s";
  out << header << "\n";
  auto field = [](const std::optional<double>& v) { return v ? format_value(*v) : ""; };
  for (const auto& row : result.rows) {
    std::string line;
    for (double v : row.param_values) line += format_value(v) + ",";
    line += row.measure;
    line += "," + field(row.analytic);
    line += "," + field(row.sim_mean);
    line += "," + field(row.sim_std_err);
    line += "," + field(row.runtime_s);
    out << line << "\n";
  }
}

double sigma_distance(double analytic, double sim_mean, double sim_std_err) {
  if (std::isinf(analytic) && std::isinf(sim_mean) &&
      std::signbit(analytic) == std::signbit(sim_mean))
    return 0.0;
  const double diff = std::fabs(analytic - sim_mean);
  if (std::isnan(diff)) return std::numeric_limits<double>::infinity();
  if (diff <= 1e-9) return 0.0;
  if (!(sim_std_err > 0.0)) return std::numeric_limits<double>::infinity();
  return diff / sim_std_err;
}

ComparisonReport compare_measures(const ExperimentConfig& config) {
  if (config.sim.regime == Regime::InsuredAdversarial)
    throw config_error(
        "compare needs a baseline or insured regime; adversarial runs have no analytic "
        "counterpart");
  const bool insured_side = config.sim.regime == Regime::Insured;
  if (insured_side && !config.policy)
    throw config_error("an insured comparison requires a policy block");
  validate_market(config.market);

  const MarketParams& mk = config.market;
  double a_ramp, a_drop, a_gain, a_fee;
  if (insured_side) {
    const InsurancePolicy& pol = *config.policy;
    a_ramp = inf_on_divergence([&] { return insured_ramp_up_time(mk, pol); });
    a_drop = insured_drop_out_probability(mk, pol);
    a_gain = inf_on_divergence([&] { return insured_long_term_profit(mk, pol).value; });
  } else {
    a_ramp = inf_on_divergence([&] { return expected_ramp_up_time(mk); });
    a_drop = drop_out_probability(mk);
    a_gain = inf_on_divergence(
        [&] { return long_term_profit(mk, GainMethod::ReducedQuadrature).value; });
  }
  const double unit = mk.unit_gain();
  a_fee = unit != 0.0 ? (mk.fee() / unit) * a_gain : 0.0;

  SimConfig sc = config.sim;
  sc.regime = insured_side ? Regime::Insured : Regime::Baseline;
  if (config.policy) sc.policy = *config.policy;
  const SimMeasures sim = monte_carlo_measures(mk, sc);

  ComparisonReport report;
  auto push = [&](const std::string& name, double analytic, const EstimateWithCI& est) {
    ComparisonRow row;
    row.measure = name;
    row.analytic = analytic;
    row.sim_mean = est.mean;
    row.sim_std_err = est.std_err;
    row.z = sigma_distance(analytic, est.mean, est.std_err);
    row.flagged = !(row.z <= 3.0);
    report.rows.push_back(row);
  };
  const std::string p = insured_side ? "insured_" : "";
  push(p + "ramp_up_days", a_ramp, sim.ramp_up);
  push(p + "drop_out_probability", a_drop, sim.drop_out);
  push(p + "seller_gain", a_gain, sim.seller_gain);
  push(p + "operator_gain", a_fee, sim.operator_gain);
  report.passed = true;
  for (const auto& row : report.rows)
    if (row.flagged) report.passed = false;
  return report;
}

}  // namespace repsim
