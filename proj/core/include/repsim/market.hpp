#pragma once

#include <string>
#include <vector>

#include "repsim/errors.hpp"

namespace repsim {

enum class AdoptionModel { Tabulated, Functional };

// How an arriving buyer decides to purchase. Tabulated mode pins the two
// adoption probabilities directly; Functional mode derives them from the
// estimated quality as P(Q_e, p) = clamp(Q_e * (1 - p), 0, 1).
struct AdoptionSpec {
  AdoptionModel model = AdoptionModel::Tabulated;
  double prob_average = 0.0;    // purchase probability quoted to average-labeled sellers
  double prob_reputable = 0.0;  // purchase probability once the seller counts as reputable
};

// Marketplace and seller parameters. Field comments give the symbol used in
// the analytic formulas.
struct MarketParams {
  double price = 1.0;               // p: sale price per transaction
  double cost = 0.0;                // c: seller's production cost per item
  double fee_fraction = 0.0;        // alpha: operator's cut of each price
  double advertised_quality = 0.8;  // Q_a: quality the listing claims
  double intrinsic_quality = 0.8;   // Q_i: quality actually delivered
  double critical_factor = 0.1;     // gamma: tolerance separating neutral from negative
  double discount_beta = 0.5;       // beta: markdown buyers apply to unproven sellers
  double consistency_theta = 0.9;   // theta: minimum positive-feedback fraction
  long long reputation_threshold = 100;  // r_h: score needed to count as reputable
  double arrival_before = 10.0;     // lambda_1: buyer arrival rate, average label
  double arrival_after = 50.0;      // lambda_2: buyer arrival rate, reputable label
  double slot_length = 3.0;         // d: days per reputation-update slot
  double patience = 180.0;          // T_w: days a new seller waits before quitting
  double gain_discount = 0.99;      // delta: per-slot discount on future gains
  double shipment_cost = 0.5;       // C_S: seller's shipment cost per returned item
  AdoptionSpec adoption;

  double unit_gain() const { return (1.0 - fee_fraction) * price - cost; }  // u
  double fee() const { return fee_fraction * price; }                       // alpha * p

  double purchase_prob_average() const;    // P_ba
  double purchase_prob_reputable() const;  // P_br

  // Per-day transaction rates for the two labels.
  double rate_average() const { return arrival_before * purchase_prob_average(); }
  double rate_reputable() const { return arrival_after * purchase_prob_reputable(); }
};

// Throws config_error on hard invariant violations; returns human-readable
// warnings for suspicious but admissible parameter choices (e.g. a negative
// per-transaction gain).
std::vector<std::string> validate_market(const MarketParams& params);

// Public reputation profile: running score and feedback tallies.
struct Profile {
  long long score = 0;     // r: positives minus negatives, accumulated
  long long positive = 0;  // n+
  long long neutral = 0;   // n0
  long long negative = 0;  // n-
};

// Feedback counts produced by one slot's transactions.
struct SlotFeedback {
  long long positive = 0;
  long long neutral = 0;
  long long negative = 0;
};

// Rating a buyer leaves: +1 when the perceived quality meets the advertised
// one, 0 when it falls short by at most critical_factor, -1 otherwise.
int feedback_rating(double perceived_quality, double advertised_quality, double critical_factor);

// Applies one slot's feedback batch to a profile (score += pos - neg, tallies
// accumulate).
Profile update_profile(Profile profile, const SlotFeedback& batch);

// Fraction of positive feedback; 0 for an empty profile.
double positive_fraction(const Profile& profile);

// Reputable means score >= reputation_threshold AND positive fraction >=
// consistency_theta.
bool is_reputable(const Profile& profile, long long reputation_threshold,
                  double consistency_theta);

// Quality buyers impute to the seller: full advertised quality when
// reputable, discounted by beta otherwise.
double estimated_quality(const Profile& profile, const MarketParams& params);

enum class SellerLabel { Average, Reputable, Insured };

// Per-day transaction rate for a seller under the given label. Certified
// (insured) sellers transact at the reputable rate.
double transaction_rate(SellerLabel label, const MarketParams& params);

}  // namespace repsim
