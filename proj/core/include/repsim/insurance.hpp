#pragma once

#include "repsim/baseline_analytics.hpp"
#include "repsim/market.hpp"

namespace repsim {

// Certificate terms offered by the operator to a new seller.
struct InsurancePolicy {
  double price = 0.0;             // C_I: one-off certificate fee
  double duration = 0.0;          // T_d: days the certificate stays active
  double clearing = 0.0;          // T_c: post-expiry window for in-flight settlements
  double deposit = 0.0;           // D_I: escrowed deposit backing refunds
  double revoke_threshold = 0.0;  // revoke once the deposit falls to or below this
};

// Throws config_error on hard violations (deposit ordering, clearing window
// shorter than a slot); returns warnings, e.g. a deposit below the
// tail-probability sizing bound at epsilon = 0.01.
std::vector<std::string> validate_policy(const InsurancePolicy& policy,
                                         const MarketParams& params);

enum class CertificateStatus { Active, Expired, Revoked, Cleared };

const char* to_string(CertificateStatus status);

struct CertificateState {
  CertificateStatus status = CertificateStatus::Active;
  double remaining_deposit = 0.0;
  double issued_at = 0.0;
  Profile profile_snapshot;     // profile at issuance (must be all-zero)
  double left_active_at = -1.0;  // when status left Active; negative while Active
  double refund_paid = 0.0;      // residual deposit returned at clearing
};

// Issues a certificate to a brand-new seller. The profile must be all-zero;
// a seller with history is past the cold-start problem the certificate
// addresses.
CertificateState issue_certificate(const MarketParams& params, const InsurancePolicy& policy,
                                   const Profile& profile, double now);

// Cash movements of settling one certificate-backed transaction.
struct SettlementOutcome {
  double seller_payout = 0.0;
  double operator_fee = 0.0;
  double buyer_refund = 0.0;
  double deposit_deduction = 0.0;
  // Seller tops up out of pocket when the deposit cannot cover the shipment
  // cost of a return.
  double supplemental_payment = 0.0;
};

// Settles one transaction against the certificate at time `now`. Positive and
// neutral ratings pay out price minus fee; a negative rating refunds the
// buyer in full and deducts the shipment cost from the deposit. Crossing the
// revoke threshold flips an Active certificate to Revoked. Settling against a
// Cleared certificate is a protocol error; Expired and Revoked certificates
// still settle in-flight transactions until they clear.
SettlementOutcome settle_transaction(CertificateState& state, int rating, double now,
                                     const MarketParams& params, const InsurancePolicy& policy);

// Polls the clock: expires an Active certificate once its duration has
// passed (stamped at the deadline, not the polling time), and clears an
// Expired or Revoked one once the clearing window has passed, refunding the
// residual deposit.
CertificateState expire_and_clear(CertificateState state, double now,
                                  const InsurancePolicy& policy);

// ---- closed-form performance measures under a certificate ----

// Expected transaction count accumulated by time t when the seller is
// certified until policy.duration and average-labeled afterwards.
double certified_mean_transactions(double t, const MarketParams& params,
                                   const InsurancePolicy& policy);

// Expected days for a certified new seller to reach the reputation threshold.
double insured_ramp_up_time(const MarketParams& params, const InsurancePolicy& policy,
                            const AnalyticOptions& opts = {});

// Probability a certified new seller still drops out (expected slot-by-slot
// transaction counts summed over the patience window).
double insured_drop_out_probability(const MarketParams& params, const InsurancePolicy& policy);

struct InsuredMeasures {
  double ramp_up = 0.0;
  double drop_out = 0.0;
  double seller_gain = 0.0;
  double operator_gain = 0.0;
};

// Expected discounted lifetime profit of a certified seller (certificate fee
// not netted out; it is priced separately below).
GainEstimate insured_long_term_profit(const MarketParams& params, const InsurancePolicy& policy,
                                      const AnalyticOptions& opts = {});

InsuredMeasures insured_measures(const MarketParams& params, const InsurancePolicy& policy,
                                 const AnalyticOptions& opts = {});

// Highest certificate fee a rational seller accepts: the gain uplift the
// certificate provides.
double max_insurance_price(const MarketParams& params, const InsurancePolicy& policy,
                           const AnalyticOptions& opts = {});

// Deposit level keeping the operator's refund exposure above-deposit with
// probability at most epsilon (Chernoff sizing of the return count).
double min_deposit_threshold(double epsilon, const MarketParams& params,
                             const InsurancePolicy& policy);

// Shortest clearing window that still lets every in-flight transaction
// settle: one reputation slot (feedback lands one slot after the sale).
double min_clearing_time(const MarketParams& params);

}  // namespace repsim
