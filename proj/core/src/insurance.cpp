#include "repsim/insurance.hpp"

#include <cmath>
#include <sstream>

namespace repsim {

const char* to_string(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::Active: return "Active";
    case CertificateStatus::Expired: return "Expired";
    case CertificateStatus::Revoked: return "Revoked";
    case CertificateStatus::Cleared: return "Cleared";
  }
  return "?";
}

std::vector<std::string> validate_policy(const InsurancePolicy& policy,
                                         const MarketParams& params) {
  auto fail = [](const std::string& msg) { throw config_error("policy: " + msg); };

  if (!(policy.price >= 0.0)) fail("price must be nonnegative");
  if (!(policy.duration >= 0.0)) fail("duration must be nonnegative");
  if (!(policy.clearing > 0.0)) fail("clearing must be positive");
  if (policy.clearing < params.slot_length) {
    fail("clearing window must cover at least one slot, or in-flight "
         "transactions could settle after the deposit is refunded");
  }
  if (!(policy.deposit > 0.0)) fail("deposit must be positive");
  if (!(policy.revoke_threshold >= 0.0)) fail("revoke_threshold must be nonnegative");
  if (!(policy.revoke_threshold < policy.deposit)) {
    fail("revoke_threshold must be below the deposit");
  }

  std::vector<std::string> warnings;
  constexpr double kSizingEpsilon = 0.01;
  const double bound = min_deposit_threshold(kSizingEpsilon, params, policy);
  if (policy.deposit < bound) {
    std::ostringstream os;
    os << "deposit " << policy.deposit << " is below the epsilon = " << kSizingEpsilon
       << " sizing bound " << bound
       << "; returns can exhaust it with non-negligible probability";
    warnings.push_back(os.str());
  }
  return warnings;
}

CertificateState issue_certificate(const MarketParams& params, const InsurancePolicy& policy,
                                   const Profile& profile, double now) {
  validate_policy(policy, params);
  if (profile.score != 0 || profile.positive != 0 || profile.neutral != 0 ||
      profile.negative != 0) {
    throw protocol_error("certificates are only issued to sellers with no history");
  }
  CertificateState state;
  state.status = CertificateStatus::Active;
  state.remaining_deposit = policy.deposit;
  state.issued_at = now;
  state.profile_snapshot = profile;
  return state;
}

SettlementOutcome settle_transaction(CertificateState& state, int rating, double now,
                                     const MarketParams& params,
                                     const InsurancePolicy& policy) {
  if (rating < -1 || rating > 1) throw std::domain_error("rating must be -1, 0, or +1");
  if (state.status == CertificateStatus::Cleared) {
    throw protocol_error("settlement attempted after the certificate cleared");
  }

  SettlementOutcome out;
  if (rating >= 0) {
    // Sale stands: operator takes its fee, seller receives the rest.
    out.operator_fee = params.fee();
    out.seller_payout = params.price - out.operator_fee;
    return out;
  }

  // Return: the buyer is made whole from the withheld payment, and the
  // seller bears the shipment cost out of the deposit.
  out.buyer_refund = params.price;
  out.deposit_deduction = std::min(params.shipment_cost, state.remaining_deposit);
  out.supplemental_payment = params.shipment_cost - out.deposit_deduction;
  state.remaining_deposit -= out.deposit_deduction;
  if (state.status == CertificateStatus::Active &&
      state.remaining_deposit <= policy.revoke_threshold) {
    state.status = CertificateStatus::Revoked;
    state.left_active_at = now;
  }
  return out;
}

CertificateState expire_and_clear(CertificateState state, double now,
                                  const InsurancePolicy& policy) {
  if (state.status == CertificateStatus::Active &&
      now >= state.issued_at + policy.duration) {
    state.status = CertificateStatus::Expired;
    state.left_active_at = state.issued_at + policy.duration;
  }
  if ((state.status == CertificateStatus::Expired ||
       state.status == CertificateStatus::Revoked) &&
      now >= state.left_active_at + policy.clearing) {
    state.status = CertificateStatus::Cleared;
    state.refund_paid = state.remaining_deposit;
    state.remaining_deposit = 0.0;
  }
  return state;
}

}  // namespace repsim
