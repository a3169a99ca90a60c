#include <algorithm>
#include <cmath>

#include "analytics_internal.hpp"
#include "repsim/insurance.hpp"
#include "repsim/numerics.hpp"

namespace repsim {

namespace {

// Expected transaction count of slot `ell` (0-based) for a seller certified
// until T_d and average-labeled afterwards; the slot containing T_d splits
// between the two rates.
double certified_slot_mean(long long ell, double A, double B, double T_d, double d) {
  const double lo = static_cast<double>(ell) * d;
  const double hi = lo + d;
  if (hi <= T_d) return A * d;
  if (lo >= T_d) return B * d;
  return A * (T_d - lo) + B * (hi - T_d);
}

struct GainContext {
  double A = 0.0;      // certified / reputable rate per day
  double B = 0.0;      // average-label rate per day
  double d = 0.0;      // slot length
  double delta = 0.0;  // per-slot discount
  double T_w = 0.0;    // patience
  double T_d = 0.0;    // certificate duration
  long long r_h = 0;   // reputation threshold
};

// Expected discounts of the k transactions that arrived before the
// threshold-hitting one, uniformly spread over (lo, hi).
double window_mean(const GainContext& c, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return uniform_ceil_discount_mean(c.delta, c.d, lo, hi);
}

// Discount carried by the expected arrivals in the remainder (t, s*d] of the
// hitting slot; the remainder may straddle the certificate deadline.
double hitting_slot_remainder(const GainContext& c, double t, double s, double disc_s) {
  const double hi = s * c.d;
  if (hi <= c.T_d) return disc_s * c.A * (hi - t);
  if (t >= c.T_d) return disc_s * c.B * (hi - t);
  return disc_s * (c.A * (c.T_d - t) + c.B * (hi - c.T_d));
}

// Unramped-by-patience branch of the discounted transaction count.
double drop_branch(const GainContext& c, const AnalyticOptions& opts) {
  if (c.T_d >= c.T_w) {
    // Certified for the whole window.
    const double mu = c.A * c.T_w;
    if (!(mu > 0.0)) return 0.0;
    return window_mean(c, 0.0, c.T_w) * mu * poisson_cdf(c.r_h - 2, mu);
  }
  const double mu_a = c.A * c.T_d;
  const double mu_b = c.B * (c.T_w - c.T_d);
  const double m1 = c.T_d > 0.0 ? window_mean(c, 0.0, c.T_d) : 0.0;
  const double m2 = window_mean(c, c.T_d, c.T_w);
  // Split the unramped event over k certified-phase arrivals and at most
  // r_h - 1 - k later ones; the inner count-weighted sums reduce to
  // mean * cdf one threshold lower.
  double total = 0.0;
  for (long long k = 0; k <= c.r_h - 1; ++k) {
    const double pk = poisson_pmf(k, mu_a);
    if (pk < opts.pmf_cutoff) continue;
    const double inner = static_cast<double>(k) * m1 * poisson_cdf(c.r_h - 1 - k, mu_b) +
                         m2 * mu_b * poisson_cdf(c.r_h - 2 - k, mu_b);
    total += pk * inner;
  }
  return total;
}

// Ramp within the certified phase: condition on the hitting time of the
// rate-A process over (0, min(T_d, T_w)).
double certified_ramp_branch(const GainContext& c, const AnalyticOptions& opts) {
  const double up = std::min(c.T_d, c.T_w);
  if (!(c.A > 0.0) || !(up > 0.0)) return 0.0;
  const double tail_coeff = c.A * c.d / (1.0 - c.delta);
  double total = 0.0;
  const long long pieces = slot_index(up, c.d);
  for (long long i = 0; i < pieces; ++i) {
    const double lo = static_cast<double>(i) * c.d;
    const double hi = std::min(static_cast<double>(i + 1) * c.d, up);
    if (!(hi > lo)) break;
    const double s = static_cast<double>(i + 1);
    const double disc_s = std::pow(c.delta, s);
    auto integrand = [&](double t) {
      const double before =
          static_cast<double>(c.r_h - 1) * window_mean(c, 0.0, t);
      const double rest = hitting_slot_remainder(c, t, s, disc_s);
      return erlang_pdf(c.r_h, c.A, t) *
             (before + disc_s + rest + tail_coeff * disc_s * c.delta);
    };
    total += integrate_1d(integrand, lo, hi, opts.quad_tol);
  }
  return total;
}

// Ramp after the certificate lapses: k arrivals while certified, the
// remaining r_h - k from the average-label process over (T_d, T_w).
double lapsed_ramp_branch(const GainContext& c, const AnalyticOptions& opts) {
  if (!(c.T_d < c.T_w) || !(c.B > 0.0)) return 0.0;
  const double mu_a = c.A * c.T_d;
  const double m1 = c.T_d > 0.0 ? window_mean(c, 0.0, c.T_d) : 0.0;
  const double tail_coeff = c.A * c.d / (1.0 - c.delta);
  double total = 0.0;
  for (long long k = 0; k <= c.r_h - 1; ++k) {
    const double pk = poisson_pmf(k, mu_a);
    if (pk < opts.pmf_cutoff) continue;
    const long long need = c.r_h - k;
    double acc = 0.0;
    double lo = c.T_d;
    while (lo < c.T_w - 1e-12) {
      const double hi =
          std::min((std::floor(lo / c.d) + 1.0) * c.d, c.T_w);
      const double s = std::floor(lo / c.d) + 1.0;  // ceil(t/d) on (lo, hi)
      const double disc_s = std::pow(c.delta, s);
      auto integrand = [&](double t) {
        const double before = static_cast<double>(k) * m1 +
                              static_cast<double>(need - 1) * window_mean(c, c.T_d, t);
        const double rest = disc_s * c.B * (s * c.d - t);
        return erlang_pdf(need, c.B, t - c.T_d) *
               (before + disc_s + rest + tail_coeff * disc_s * c.delta);
      };
      acc += integrate_1d(integrand, lo, hi, opts.quad_tol);
      lo = hi;
    }
    total += pk * acc;
  }
  return total;
}

double insured_transaction_count(const MarketParams& params, const InsurancePolicy& policy,
                                 const AnalyticOptions& opts) {
  GainContext c;
  c.A = params.rate_reputable();
  c.B = params.rate_average();
  c.d = params.slot_length;
  c.delta = params.gain_discount;
  c.T_w = params.patience;
  c.T_d = policy.duration;
  c.r_h = params.reputation_threshold;

  if (!(c.A > 0.0) && !(c.B > 0.0)) return 0.0;
  if (c.delta >= 1.0) {
    throw divergence_error(
        "undiscounted lifetime gain diverges: gain_discount must be below 1");
  }
  return drop_branch(c, opts) + certified_ramp_branch(c, opts) +
         lapsed_ramp_branch(c, opts);
}

}  // namespace

double certified_mean_transactions(double t, const MarketParams& params,
                                   const InsurancePolicy& policy) {
  const double certified = std::min(std::max(t, 0.0), policy.duration);
  const double after = std::max(0.0, t - policy.duration);
  return params.rate_reputable() * certified + params.rate_average() * after;
}

double insured_ramp_up_time(const MarketParams& params, const InsurancePolicy& policy,
                            const AnalyticOptions& opts) {
  if (!(params.rate_average() > 0.0)) {
    // Arrivals stop for good once the certificate lapses; the expectation
    // only exists if the threshold is effectively certain to be hit before.
    const double never = poisson_cdf(params.reputation_threshold - 1,
                                     params.rate_reputable() * policy.duration);
    if (never >= opts.tail_tolerance) {
      throw divergence_error(
          "ramp-up expectation diverges: the certificate can lapse before the "
          "threshold with nonzero probability and no transactions follow");
    }
  }
  return internal::ramp_up_series(
      params.reputation_threshold, params.slot_length,
      [&](double t) { return certified_mean_transactions(t, params, policy); }, opts,
      "certified ramp-up expectation");
}

double insured_drop_out_probability(const MarketParams& params,
                                    const InsurancePolicy& policy) {
  const double d = params.slot_length;
  const long long window_slots = slot_index(params.patience, d);
  const double A = params.rate_reputable();
  const double B = params.rate_average();
  double mean = 0.0;
  for (long long ell = 0; ell < window_slots; ++ell) {
    mean += certified_slot_mean(ell, A, B, policy.duration, d);
  }
  return poisson_cdf(params.reputation_threshold - 1, mean);
}

GainEstimate insured_long_term_profit(const MarketParams& params,
                                      const InsurancePolicy& policy,
                                      const AnalyticOptions& opts) {
  return {params.unit_gain() * insured_transaction_count(params, policy, opts), 0.0};
}

InsuredMeasures insured_measures(const MarketParams& params, const InsurancePolicy& policy,
                                 const AnalyticOptions& opts) {
  const auto scaled = detail::scale_gains(
      insured_ramp_up_time(params, policy, opts),
      insured_drop_out_probability(params, policy),
      insured_transaction_count(params, policy, opts), params);
  return {scaled.ramp_up, scaled.drop_out, scaled.seller_gain, scaled.operator_gain};
}

double max_insurance_price(const MarketParams& params, const InsurancePolicy& policy,
                           const AnalyticOptions& opts) {
  const double with_certificate =
      insured_long_term_profit(params, policy, opts).value;
  const double without =
      long_term_profit(params, GainMethod::ReducedQuadrature, {}, opts).value;
  return with_certificate - without;
}

double min_deposit_threshold(double epsilon, const MarketParams& params,
                             const InsurancePolicy& policy) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw config_error("epsilon must lie strictly between 0 and 1");
  }
  // Expected number of certified-phase transactions; each can cost the
  // deposit one shipment fee.
  const double lambda = params.rate_reputable() * policy.duration;
  const double chernoff = std::exp(2.0) * lambda;
  const double small_rate = std::log(1.0 / epsilon) - lambda;
  return params.shipment_cost * std::max(small_rate, chernoff);
}

double min_clearing_time(const MarketParams& params) {
  // Feedback (and thus settlement) lands one slot after the sale, so one
  // slot is exactly the in-flight horizon.
  return params.slot_length;
}

}  // namespace repsim
