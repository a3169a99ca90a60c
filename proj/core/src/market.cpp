#include "repsim/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace repsim {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double functional_adoption(double estimated_quality, double price) {
  return clamp01(estimated_quality * (1.0 - price));
}

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

double MarketParams::purchase_prob_average() const {
  if (adoption.model == AdoptionModel::Tabulated) return adoption.prob_average;
  // Buyers see the discounted quality estimate of an unproven seller; an
  // honest listing is assumed when reducing to a constant.
  return functional_adoption(discount_beta * advertised_quality, price);
}

double MarketParams::purchase_prob_reputable() const {
  if (adoption.model == AdoptionModel::Tabulated) return adoption.prob_reputable;
  return functional_adoption(advertised_quality, price);
}

std::vector<std::string> validate_market(const MarketParams& p) {
  auto fail = [](const std::string& msg) { throw config_error("market: " + msg); };

  if (!(p.price >= 0.0)) fail("price must be nonnegative");
  if (!(p.cost >= 0.0)) fail("cost must be nonnegative");
  if (!is_probability(p.fee_fraction)) fail("fee_fraction must lie in [0, 1]");
  if (!is_probability(p.advertised_quality)) fail("advertised_quality must lie in [0, 1]");
  if (!is_probability(p.intrinsic_quality)) fail("intrinsic_quality must lie in [0, 1]");
  if (p.advertised_quality < p.intrinsic_quality) {
    fail("advertised_quality must be at least intrinsic_quality");
  }
  if (!(p.critical_factor >= 0.0)) fail("critical_factor must be nonnegative");
  if (!is_probability(p.discount_beta)) fail("discount_beta must lie in [0, 1]");
  if (!is_probability(p.consistency_theta)) fail("consistency_theta must lie in [0, 1]");
  if (p.reputation_threshold < 1) fail("reputation_threshold must be at least 1");
  if (!(p.arrival_before >= 0.0)) fail("arrival_before must be nonnegative");
  if (!(p.arrival_after >= 0.0)) fail("arrival_after must be nonnegative");
  if (!(p.arrival_before < p.arrival_after)) {
    fail("arrival_before must be smaller than arrival_after");
  }
  if (!(p.slot_length > 0.0)) fail("slot_length must be positive");
  if (!(p.patience > 0.0)) fail("patience must be positive");
  const double slots = p.patience / p.slot_length;
  if (std::abs(slots - std::round(slots)) > 1e-9 * std::max(1.0, slots)) {
    fail("patience must be a whole number of slots");
  }
  if (!(p.gain_discount > 0.0 && p.gain_discount <= 1.0)) {
    fail("gain_discount must lie in (0, 1]");
  }
  if (!(p.shipment_cost >= 0.0)) fail("shipment_cost must be nonnegative");
  if (p.adoption.model == AdoptionModel::Tabulated) {
    if (!is_probability(p.adoption.prob_average)) fail("adoption_before must lie in [0, 1]");
    if (!is_probability(p.adoption.prob_reputable)) fail("adoption_after must lie in [0, 1]");
  }

  std::vector<std::string> warnings;
  if (p.unit_gain() < 0.0) {
    std::ostringstream os;
    os << "per-transaction gain (1 - fee_fraction) * price - cost = " << p.unit_gain()
       << " is negative; the seller loses money on every sale";
    warnings.push_back(os.str());
  }
  if (p.adoption.model == AdoptionModel::Functional && p.price > 1.0) {
    warnings.push_back(
        "price above 1 drives the functional adoption probability to zero");
  }
  return warnings;
}

int feedback_rating(double perceived_quality, double advertised_quality,
                    double critical_factor) {
  if (perceived_quality >= advertised_quality) return 1;
  if (perceived_quality >= advertised_quality - critical_factor) return 0;
  return -1;
}

Profile update_profile(Profile profile, const SlotFeedback& batch) {
  profile.score += batch.positive - batch.negative;
  profile.positive += batch.positive;
  profile.neutral += batch.neutral;
  profile.negative += batch.negative;
  return profile;
}

double positive_fraction(const Profile& profile) {
  const long long total = profile.positive + profile.neutral + profile.negative;
  if (total <= 0) return 0.0;
  return static_cast<double>(profile.positive) / static_cast<double>(total);
}

bool is_reputable(const Profile& profile, long long reputation_threshold,
                  double consistency_theta) {
  return profile.score >= reputation_threshold &&
         positive_fraction(profile) >= consistency_theta;
}

double estimated_quality(const Profile& profile, const MarketParams& params) {
  const bool reputable = is_reputable(profile, params.reputation_threshold,
                                      params.consistency_theta);
  return reputable ? params.advertised_quality
                   : params.discount_beta * params.advertised_quality;
}

double transaction_rate(SellerLabel label, const MarketParams& params) {
  switch (label) {
    case SellerLabel::Average:
      return params.rate_average();
    case SellerLabel::Reputable:
    case SellerLabel::Insured:
      return params.rate_reputable();
  }
  throw std::domain_error("unknown seller label");
}

}  // namespace repsim
