#include "repsim/baseline_analytics.hpp"

#include <cmath>

#include "analytics_internal.hpp"
#include "repsim/numerics.hpp"
#include "repsim/simulator.hpp"

namespace repsim {

double expected_ramp_up_time(const MarketParams& params, const AnalyticOptions& opts) {
  const double rate = params.rate_average();
  if (!(rate > 0.0)) {
    throw divergence_error(
        "ramp-up expectation diverges: average-label transaction rate is zero");
  }
  return internal::ramp_up_series(
      params.reputation_threshold, params.slot_length,
      [rate](double t) { return rate * t; }, opts, "ramp-up expectation");
}

double drop_out_probability(const MarketParams& params) {
  return poisson_cdf(params.reputation_threshold - 1,
                     params.rate_average() * params.patience);
}

namespace detail {

double discounted_transaction_count(const MarketParams& params, const AnalyticOptions& opts) {
  const double B = params.rate_average();
  const double A = params.rate_reputable();
  const double d = params.slot_length;
  const double delta = params.gain_discount;
  const double T_w = params.patience;
  const long long r_h = params.reputation_threshold;

  if (!(B > 0.0)) return 0.0;  // no transactions ever arrive
  if (delta >= 1.0) {
    throw divergence_error(
        "undiscounted lifetime gain diverges: gain_discount must be below 1");
  }

  // Seller quits unramped: all transactions land in the patience window at
  // the average-label rate. Summing count * pmf reduces to mean * cdf one
  // threshold lower.
  const double mu_w = B * T_w;
  double total = uniform_ceil_discount_mean(delta, d, 0.0, T_w) * mu_w *
                 poisson_cdf(r_h - 2, mu_w);

  // Seller ramps at some t <= T_w: condition on the threshold-hitting time
  // (Erlang density) and add the expected discounts of the transactions
  // before t, the hitting one, the remainder of its slot, and the reputable
  // phase from the next slot on.
  const double tail_coeff = A * d / (1.0 - delta);
  const long long slots = slot_index(T_w, d);
  for (long long i = 0; i < slots; ++i) {
    const double lo = static_cast<double>(i) * d;
    const double hi = std::min(static_cast<double>(i + 1) * d, T_w);
    if (!(hi > lo)) break;
    const double s = static_cast<double>(i + 1);  // ceil(t/d) on this piece
    const double disc_s = std::pow(delta, s);
    auto integrand = [&](double t) {
      const double before = static_cast<double>(r_h - 1) *
                            uniform_ceil_discount_mean(delta, d, 0.0, t);
      const double rest_of_slot = disc_s * B * (d * s - t);
      const double tail = tail_coeff * disc_s * delta;
      return erlang_pdf(r_h, B, t) * (before + disc_s + rest_of_slot + tail);
    };
    total += integrate_1d(integrand, lo, hi, opts.quad_tol);
  }
  return total;
}

BaselineMeasures scale_gains(double ramp_up, double drop_out, double count,
                             const MarketParams& params) {
  BaselineMeasures m;
  m.ramp_up = ramp_up;
  m.drop_out = drop_out;
  const double u = params.unit_gain();
  m.seller_gain = u * count;
  // Derive the operator gain from the seller gain where possible so the
  // proportionality is exact, not merely up to rounding.
  m.operator_gain = u != 0.0 ? (params.fee() / u) * m.seller_gain
                             : params.fee() * count;
  return m;
}

}  // namespace detail

GainEstimate long_term_profit(const MarketParams& params, GainMethod method,
                              const ProfitSimOptions& sim, const AnalyticOptions& opts) {
  if (method == GainMethod::ReducedQuadrature) {
    const double count = detail::discounted_transaction_count(params, opts);
    return {params.unit_gain() * count, 0.0};
  }
  SimConfig config;
  config.runs = sim.runs;
  config.seed = sim.seed;
  config.regime = Regime::Baseline;
  const auto measures = monte_carlo_measures(params, config);
  return {measures.seller_gain.mean, measures.seller_gain.std_err};
}

BaselineMeasures baseline_measures(const MarketParams& params, const AnalyticOptions& opts) {
  return detail::scale_gains(expected_ramp_up_time(params, opts),
                             drop_out_probability(params),
                             detail::discounted_transaction_count(params, opts), params);
}

}  // namespace repsim
