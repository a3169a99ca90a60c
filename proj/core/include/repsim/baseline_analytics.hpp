#pragma once

#include <cstdint>

#include "repsim/market.hpp"

namespace repsim {

// Shared knobs for the closed-form evaluations.
struct AnalyticOptions {
  // Stop infinite series once the remaining survival mass drops below this.
  double tail_tolerance = 1e-12;
  // Iteration budget for those series; exceeding it raises divergence_error.
  long long max_slots = 5'000'000;
  // Per-piece absolute quadrature tolerance for the gain integrals.
  double quad_tol = 1e-9;
  // Mixture terms with Poisson weight below this are skipped.
  double pmf_cutoff = 1e-18;
};

// Expected days until a new seller's score first reaches the reputation
// threshold, with reputation updates granted at slot boundaries. Diverges
// (and throws) when the average-label transaction rate is zero.
double expected_ramp_up_time(const MarketParams& params, const AnalyticOptions& opts = {});

// Probability the ramp-up takes longer than the seller's patience.
double drop_out_probability(const MarketParams& params);

enum class GainMethod { ReducedQuadrature, MonteCarlo };

struct GainEstimate {
  double value = 0.0;
  double std_err = 0.0;  // zero for closed-form evaluations
};

struct ProfitSimOptions {
  long long runs = 100000;
  std::uint64_t seed = 20260819ULL;
};

// Expected discounted lifetime profit of a new seller. ReducedQuadrature
// evaluates the closed form (one-dimensional integrals over the ramp-up
// time); MonteCarlo delegates to the simulator and reports a standard error.
// Throws divergence_error when the discounted sum itself diverges
// (gain_discount == 1 with a reachable reputable phase).
GainEstimate long_term_profit(const MarketParams& params, GainMethod method,
                              const ProfitSimOptions& sim = {},
                              const AnalyticOptions& opts = {});

struct BaselineMeasures {
  double ramp_up = 0.0;        // E[T_r], days
  double drop_out = 0.0;       // P_d
  double seller_gain = 0.0;    // G_s
  double operator_gain = 0.0;  // G_e = (fee / unit gain) * G_s
};

// All four closed-form measures in one call. The operator gain is derived
// from the seller gain so the proportionality holds bit-exactly.
BaselineMeasures baseline_measures(const MarketParams& params, const AnalyticOptions& opts = {});

namespace detail {
// Expected discounted transaction count (the gain with the per-transaction
// profit factored out); shared by the seller and operator measures.
double discounted_transaction_count(const MarketParams& params, const AnalyticOptions& opts);
// Scale a unit-free discounted count into seller / operator gains such that
// operator_gain == (fee / unit_gain) * seller_gain holds exactly.
BaselineMeasures scale_gains(double ramp_up, double drop_out, double count,
                             const MarketParams& params);
}  // namespace detail

}  // namespace repsim
