#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repsim/insurance.hpp"
#include "repsim/market.hpp"

namespace repsim {

enum class Regime { Baseline, Insured, InsuredAdversarial };

struct SimConfig {
  long long runs = 100000;
  std::uint64_t seed = 20260819ULL;
  // Finite-horizon cutoff in slots. 0 derives a horizon long enough that the
  // ramp-up is observed essentially surely (the infinite-horizon target).
  long long horizon_slots = 0;
  Regime regime = Regime::Baseline;
  InsurancePolicy policy;  // consulted by the insured regimes
  // Listing quality an adversarial seller advertises (its intrinsic quality
  // stays params.intrinsic_quality).
  double adversarial_advertised_quality = 0.0;
  // Replace the unbounded post-ramp phase by its closed-form expectation
  // (variance reduction); disable to accumulate plain truncated sums.
  bool analytic_tail = true;
  bool record_transactions = false;
  bool record_settlements = false;
};

// One settled transaction, for protocol inspection.
struct SettlementRecord {
  long long slot = 0;  // slot the transaction arrived in
  int rating = 0;
  bool certificate_backed = false;
  SettlementOutcome outcome;
  double deposit_after = 0.0;
  CertificateStatus status_after = CertificateStatus::Active;
};

struct SellerTrajectory {
  // Arrival times, strictly increasing (populated when record_transactions).
  std::vector<double> transaction_times;
  std::vector<SlotFeedback> slot_feedback;  // one entry per simulated slot
  // First slot boundary at which the score reached the threshold, in days
  // (always a positive multiple of the slot length); absent if never reached.
  std::optional<double> ramp_up_day;
  bool dropped_out = false;  // no ramp-up within the patience window
  // Realized discounted profit stream: sum over settled sales of
  // (payout - cost) * delta^(arrival slot), plus the closed-form reputable
  // tail when enabled. Deposit movements are tracked separately.
  double discounted_gain = 0.0;
  // Discounted count of fee-bearing settlements (the operator's gain equals
  // this times the fee).
  double discounted_transactions = 0.0;
  // Snapshots at issuance and at every status transition.
  std::vector<CertificateState> certificate_history;
  std::vector<SettlementRecord> settlements;  // when record_settlements
  double supplemental_payments = 0.0;
  double certificate_fee_paid = 0.0;
  bool truncated = false;  // horizon ended before the ramp-up was observed
};

struct EstimateWithCI {
  double mean = 0.0;
  double std_err = 0.0;  // sample standard deviation / sqrt(n)
  long long n = 0;
};

struct SimMeasures {
  EstimateWithCI ramp_up;      // days; +infinity when the ramp is unreachable
  EstimateWithCI drop_out;
  EstimateWithCI seller_gain;
  EstimateWithCI operator_gain;
};

// Stream derivation: the per-run generator is std::mt19937_64 seeded with
// splitmix64(splitmix64(seed) XOR splitmix64(golden_gamma * (run_index + 1))),
// so runs are decorrelated and any subset can be reproduced independently of
// execution order.
std::uint64_t run_stream_seed(std::uint64_t seed, long long run_index);

// Simulates one seller lifetime: per slot, buyer transactions arrive as a
// Poisson count at the label's thinned rate, feedback lands at the next slot
// boundary, reputation and certificate state update there, and gains are
// discounted by the arrival slot. Gains for a seller who never ramps within
// the patience window stop there (the seller quits); the arrival process is
// still followed further so the unconditional ramp-up time can be measured.
SellerTrajectory simulate_seller(const MarketParams& params, const SimConfig& config,
                                 long long run_index);

// Aggregates simulate_seller over runs 0..runs-1 with per-run streams derived
// from (seed, run_index); deterministic for fixed inputs regardless of
// scheduling. Throws horizon_error (listing the affected runs) if any run's
// ramp-up was cut off by a finite horizon it could have outlived.
SimMeasures monte_carlo_measures(const MarketParams& params, const SimConfig& config);

struct AuditReport {
  long long runs = 0;
  long long revoked_by_deposit = 0;
  long long revoked_by_consistency = 0;
  long long expired = 0;
  long long certificate_settlements = 0;
  long long refunded_sales = 0;
  double total_deposit_deductions = 0.0;
  double total_supplements = 0.0;
  std::vector<std::string> failures;  // empty when every assertion held
  bool passed = false;
};

// Replays insured trajectories and checks the settlement protocol against
// its ledger invariants: buyer refunds equal the price on every return, each
// return costs the seller exactly the shipment fee (deposit first, then
// supplements), revocation fires at the deposit threshold crossing or the
// consistency breach, nothing settles after clearing, and honest sellers get
// their full deposit back. Violations name the run and slot.
AuditReport adversarial_protocol_audit(const MarketParams& params,
                                       const InsurancePolicy& policy,
                                       const SimConfig& config);

}  // namespace repsim
