#include "repsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "repsim/errors.hpp"
#include "repsim/numerics.hpp"

namespace repsim {
namespace {

// Derived horizons extend until the chance of an unobserved ramp-up is below
// this, so finite-horizon truncation cannot bias the estimates.
constexpr double kRampCdfCutoff = 1e-12;
constexpr long long kMaxDerivedHorizon = 1LL << 26;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

long long poisson_count(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<long long> dist(mean);
  return dist(rng);
}

// Quality the seller lists, which is what buyers rate against.
double listed_quality(const MarketParams& params, const SimConfig& config) {
  return config.regime == Regime::InsuredAdversarial ? config.adversarial_advertised_quality
                                                     : params.advertised_quality;
}

int expected_rating_for(const MarketParams& params, const SimConfig& config) {
  return feedback_rating(params.intrinsic_quality, listed_quality(params, config),
                         params.critical_factor);
}

// The ramp-up happens almost surely iff transactions keep satisfying buyers
// and keep arriving after any certificate lapses.
bool ramp_is_certain(const MarketParams& params, const SimConfig& config) {
  return expected_rating_for(params, config) == 1 && params.rate_average() > 0.0;
}

long long patience_slots(const MarketParams& params) {
  return std::llround(params.patience / params.slot_length);
}

void check_config(const MarketParams& params, const SimConfig& config) {
  if (config.runs < 1) throw config_error("runs must be positive");
  if (config.regime == Regime::InsuredAdversarial) {
    const double q = config.adversarial_advertised_quality;
    if (!(q >= 0.0 && q <= 1.0) || q < params.intrinsic_quality)
      throw config_error(
          "adversarial_advertised_quality must lie in [0,1] and overstate the intrinsic quality");
  }
  if (config.analytic_tail && params.gain_discount >= 1.0)
    throw config_error("the closed-form reputable tail requires gain_discount < 1");
}

long long resolve_horizon(const MarketParams& params, const SimConfig& config) {
  const double d = params.slot_length;
  if (config.horizon_slots > 0) {
    if (config.horizon_slots * d + 1e-9 < params.patience)
      throw config_error("horizon_slots must cover the patience window");
    return config.horizon_slots;
  }
  long long base = patience_slots(params) + 2;
  if (config.regime != Regime::Baseline) {
    // Leave room for the certificate to expire and clear.
    base = std::max(base, slot_index(config.policy.duration + config.policy.clearing, d) + 2);
  }
  long long horizon = std::max<long long>(base, 64);
  if (!ramp_is_certain(params, config)) return horizon;
  while (horizon < kMaxDerivedHorizon) {
    const double mean = config.regime == Regime::Baseline
                            ? params.rate_average() * (horizon * d)
                            : certified_mean_transactions(horizon * d, params, config.policy);
    if (poisson_cdf(params.reputation_threshold - 1, mean) < kRampCdfCutoff) break;
    horizon *= 2;
  }
  return horizon;
}

void tally(SlotFeedback& batch, int rating, long long n) {
  if (rating > 0)
    batch.positive += n;
  else if (rating == 0)
    batch.neutral += n;
  else
    batch.negative += n;
}

// Neumaier-compensated mean and standard error; summation order is the index
// order, and the compensation keeps any reordering differences far below the
// estimates' own precision.
EstimateWithCI estimate_from(const std::vector<double>& values) {
  EstimateWithCI est;
  est.n = static_cast<long long>(values.size());
  if (values.empty()) return est;
  double sum = 0.0, comp = 0.0;
  for (double x : values) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  est.mean = (sum + comp) / static_cast<double>(est.n);
  if (est.n > 1 && std::isfinite(est.mean)) {
    double ss = 0.0, c2 = 0.0;
    for (double x : values) {
      const double dev = x - est.mean;
      const double sq = dev * dev;
      const double t = ss + sq;
      c2 += std::fabs(ss) >= sq ? (ss - t) + sq : (sq - t) + ss;
      ss = t;
    }
    ss += c2;
    if (ss < 0.0) ss = 0.0;
    est.std_err = std::sqrt(ss / static_cast<double>(est.n - 1)) /
                  std::sqrt(static_cast<double>(est.n));
  }
  return est;
}

struct PendingPiece {
  long long count = 0;
  bool certificate_backed = false;
};

}  // namespace

std::uint64_t run_stream_seed(std::uint64_t seed, long long run_index) {
  const std::uint64_t gamma = 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(run_index + 1);
  return splitmix64(splitmix64(seed) ^ splitmix64(gamma));
}

SellerTrajectory simulate_seller(const MarketParams& params, const SimConfig& config,
                                 long long run_index) {
  if (run_index < 0) throw config_error("run_index must be nonnegative");
  check_config(params, config);
  const long long horizon = resolve_horizon(params, config);

  const double d = params.slot_length;
  const double delta = params.gain_discount;
  const double price = params.price;
  const double cost = params.cost;
  const double fee_amount = params.fee();
  const long long threshold = params.reputation_threshold;
  const long long window_slots = patience_slots(params);
  const double certified_rate = transaction_rate(SellerLabel::Insured, params);
  const int rating = expected_rating_for(params, config);
  const InsurancePolicy& policy = config.policy;

  std::mt19937_64 rng(run_stream_seed(config.seed, run_index));

  SellerTrajectory traj;
  Profile profile;
  std::optional<CertificateState> cert;
  if (config.regime != Regime::Baseline) {
    cert = issue_certificate(params, policy, profile, 0.0);
    traj.certificate_fee_paid = policy.price;
    traj.certificate_history.push_back(*cert);
  }

  // gain_all / fees_all run uncensored (they matter when the ramp lands
  // inside the patience window); gain_pre / fees_pre stop at the window edge
  // (the seller quits there when it never ramps).
  double gain_all = 0.0, gain_pre = 0.0;
  double fees_all = 0.0, fees_pre = 0.0;
  bool accrue = true;
  long long ramp_boundary = -1;

  std::vector<PendingPiece> pending;
  for (long long slot = 0; slot < horizon; ++slot) {
    // Arrivals within [slot*d, (slot+1)*d), split where certificate coverage
    // ends mid-slot.
    const double lo = slot * d;
    const double hi = lo + d;
    const bool reputable = is_reputable(profile, threshold, params.consistency_theta);
    const double base_rate =
        transaction_rate(reputable ? SellerLabel::Reputable : SellerLabel::Average, params);

    pending.clear();
    auto add_piece = [&](double a, double b, double rate, bool backed) {
      if (b <= a) return;
      const long long n = poisson_count(rng, rate * (b - a));
      if (n > 0 && config.record_transactions) {
        std::uniform_real_distribution<double> uni(a, b);
        std::vector<double> times(n);
        for (auto& t : times) t = uni(rng);
        std::sort(times.begin(), times.end());
        for (std::size_t i = 1; i < times.size(); ++i)
          if (times[i] <= times[i - 1])
            times[i] = std::nextafter(times[i - 1], std::numeric_limits<double>::infinity());
        traj.transaction_times.insert(traj.transaction_times.end(), times.begin(), times.end());
      }
      if (n > 0) pending.push_back({n, backed});
    };
    if (cert && cert->status == CertificateStatus::Active) {
      const double cert_end = cert->issued_at + policy.duration;
      if (cert_end >= hi) {
        add_piece(lo, hi, certified_rate, true);
      } else if (cert_end > lo) {
        add_piece(lo, cert_end, certified_rate, true);
        add_piece(cert_end, hi, base_rate, false);
      } else {
        add_piece(lo, hi, base_rate, false);
      }
    } else {
      add_piece(lo, hi, base_rate, false);
    }

    // Boundary at (slot+1)*d: settle the batch, apply feedback, move the
    // certificate lifecycle, then test for the ramp-up.
    const long long tau = slot + 1;
    const double now = tau * d;
    const double disc = std::pow(delta, static_cast<double>(tau));
    SlotFeedback batch;
    for (const auto& piece : pending) {
      tally(batch, rating, piece.count);
      if (!piece.certificate_backed) {
        // Ordinary marketplace sale: no recourse, every rating pays out.
        const double payout = price - fee_amount;
        if (accrue) {
          const double add = (payout - cost) * piece.count * disc;
          const double fee_add = piece.count * disc;
          gain_all += add;
          fees_all += fee_add;
          if (slot < window_slots) {
            gain_pre += add;
            fees_pre += fee_add;
          }
        }
        if (config.record_settlements) {
          SettlementRecord rec;
          rec.slot = slot;
          rec.rating = rating;
          rec.certificate_backed = false;
          rec.outcome.seller_payout = payout;
          rec.outcome.operator_fee = fee_amount;
          rec.deposit_after = cert ? cert->remaining_deposit : 0.0;
          rec.status_after = cert ? cert->status : CertificateStatus::Active;
          for (long long i = 0; i < piece.count; ++i) traj.settlements.push_back(rec);
        }
      } else {
        for (long long i = 0; i < piece.count; ++i) {
          const CertificateStatus before = cert->status;
          const SettlementOutcome out = settle_transaction(*cert, rating, now, params, policy);
          if (cert->status != before) traj.certificate_history.push_back(*cert);
          traj.supplemental_payments += out.supplemental_payment;
          if (accrue) {
            const double add = (out.seller_payout - cost) * disc;
            gain_all += add;
            if (slot < window_slots) gain_pre += add;
            if (rating >= 0) {
              fees_all += disc;
              if (slot < window_slots) fees_pre += disc;
            }
          }
          if (config.record_settlements) {
            SettlementRecord rec;
            rec.slot = slot;
            rec.rating = rating;
            rec.certificate_backed = true;
            rec.outcome = out;
            rec.deposit_after = cert->remaining_deposit;
            rec.status_after = cert->status;
            traj.settlements.push_back(rec);
          }
        }
      }
    }
    traj.slot_feedback.push_back(batch);
    profile = update_profile(profile, batch);

    if (cert) {
      // Expiry first: a certificate past its term cannot be revoked anymore.
      const CertificateStatus before = cert->status;
      *cert = expire_and_clear(*cert, now, policy);
      if (cert->status != before) traj.certificate_history.push_back(*cert);
    }
    if (cert && cert->status == CertificateStatus::Active) {
      const long long feedback_total = profile.positive + profile.neutral + profile.negative;
      if (feedback_total > 0 && positive_fraction(profile) < params.consistency_theta) {
        cert->status = CertificateStatus::Revoked;
        cert->left_active_at = now;
        traj.certificate_history.push_back(*cert);
      }
    }

    if (ramp_boundary < 0 && profile.score >= threshold) {
      ramp_boundary = tau;
      traj.ramp_up_day = now;
      if (config.analytic_tail) {
        if (tau <= window_slots) {
          // Reputable phase replaced by its expectation: certified-rate sales
          // forever, discounted from the slot after the ramp.
          const double tail_count =
              certified_rate * d * std::pow(delta, static_cast<double>(tau + 1)) / (1.0 - delta);
          gain_all += params.unit_gain() * tail_count;
          fees_all += tail_count;
        }
        accrue = false;
      }
    }

    // With the tail in place the rest of the run only matters while a
    // certificate still has to clear.
    if (ramp_boundary >= 0 && config.analytic_tail &&
        (!cert || cert->status == CertificateStatus::Cleared))
      break;
  }

  traj.truncated = ramp_boundary < 0;
  traj.dropped_out = ramp_boundary < 0 || ramp_boundary > window_slots;
  const bool ramped_in_window = ramp_boundary >= 0 && ramp_boundary <= window_slots;
  traj.discounted_gain = ramped_in_window ? gain_all : gain_pre;
  traj.discounted_transactions = ramped_in_window ? fees_all : fees_pre;
  return traj;
}

SimMeasures monte_carlo_measures(const MarketParams& params, const SimConfig& config) {
  validate_market(params);
  if (config.runs < 100)
    throw config_error("simulation needs at least 100 runs for stable standard errors");
  check_config(params, config);
  if (config.regime != Regime::Baseline) validate_policy(config.policy, params);

  SimConfig cfg = config;
  cfg.horizon_slots = resolve_horizon(params, config);
  const bool certain = ramp_is_certain(params, config);

  std::vector<double> ramps, drops, gains, fees;
  ramps.reserve(cfg.runs);
  drops.reserve(cfg.runs);
  gains.reserve(cfg.runs);
  fees.reserve(cfg.runs);
  std::vector<long long> truncated;
  const double fee_amount = params.fee();
  for (long long run = 0; run < cfg.runs; ++run) {
    const SellerTrajectory traj = simulate_seller(params, cfg, run);
    if (traj.truncated) truncated.push_back(run);
    if (traj.ramp_up_day) ramps.push_back(*traj.ramp_up_day);
    drops.push_back(traj.dropped_out ? 1.0 : 0.0);
    gains.push_back(traj.discounted_gain);
    fees.push_back(fee_amount * traj.discounted_transactions);
  }

  if (certain && !truncated.empty()) {
    std::ostringstream msg;
    msg << "horizon of " << cfg.horizon_slots << " slots truncated " << truncated.size() << " of "
        << cfg.runs << " runs before ramp-up (runs";
    const std::size_t shown = std::min<std::size_t>(truncated.size(), 12);
    for (std::size_t i = 0; i < shown; ++i) msg << (i ? ", " : " ") << truncated[i];
    if (truncated.size() > shown) msg << ", ...";
    msg << "); increase horizon_slots";
    throw horizon_error(msg.str());
  }

  SimMeasures measures;
  if (certain) {
    measures.ramp_up = estimate_from(ramps);
  } else {
    // Some (or all) runs can never ramp, so the expectation is infinite.
    measures.ramp_up = {std::numeric_limits<double>::infinity(), 0.0, cfg.runs};
  }
  measures.drop_out = estimate_from(drops);
  measures.seller_gain = estimate_from(gains);
  measures.operator_gain = estimate_from(fees);
  return measures;
}

namespace {

// Checks one insured trajectory's ledger against the protocol rules;
// appends human-readable violations to `failures`.
void audit_trajectory(const MarketParams& params, const InsurancePolicy& policy,
                      const SellerTrajectory& traj, long long run, int expected_rating,
                      AuditReport& rep) {
  auto fail = [&](long long slot, const std::string& what) {
    if (rep.failures.size() < 64) {
      std::ostringstream msg;
      msg << "run " << run << ", slot " << slot << ": " << what;
      rep.failures.push_back(msg.str());
    }
  };
  const double d = params.slot_length;
  const double cs = params.shipment_cost;

  if (traj.certificate_history.empty()) {
    fail(-1, "no certificate was issued");
    return;
  }
  const CertificateState& issued = traj.certificate_history.front();
  if (issued.status != CertificateStatus::Active ||
      issued.remaining_deposit != policy.deposit || issued.issued_at != 0.0)
    fail(-1, "issuance snapshot is not a fresh certificate");

  // When did the certificate clear, if ever?
  double cleared_at = std::numeric_limits<double>::infinity();
  double final_refund = -1.0;
  bool saw_revoked = false, saw_expired = false;
  for (const auto& state : traj.certificate_history) {
    if (state.status == CertificateStatus::Revoked) saw_revoked = true;
    if (state.status == CertificateStatus::Expired) saw_expired = true;
    if (state.status == CertificateStatus::Cleared) {
      cleared_at = state.left_active_at + policy.clearing;
      final_refund = state.refund_paid;
    }
  }

  // Ledger replay over the settlement stream.
  double deposit = policy.deposit;
  bool deposit_revocation = false;
  long long current_slot = -1;
  double slot_loss = 0.0, slot_deposit0 = policy.deposit;
  long long slot_negatives = 0;
  auto flush_slot = [&]() {
    if (slot_negatives > 0 && expected_rating == -1) {
      const double floor = std::min(slot_deposit0, cs * static_cast<double>(slot_negatives));
      if (slot_loss + 1e-9 < floor) fail(current_slot, "slot loss below the deduction floor");
    }
    slot_loss = 0.0;
    slot_negatives = 0;
    slot_deposit0 = deposit;
  };

  for (const auto& rec : traj.settlements) {
    const auto& out = rec.outcome;
    if (!rec.certificate_backed) {
      if (out.buyer_refund != 0.0 || out.deposit_deduction != 0.0 ||
          out.supplemental_payment != 0.0)
        fail(rec.slot, "recourse outside the certificate");
      continue;
    }
    if (rec.slot != current_slot) {
      flush_slot();
      current_slot = rec.slot;
    }
    rep.certificate_settlements++;
    const double settle_time = (rec.slot + 1) * d;
    if (settle_time > cleared_at + 1e-9) fail(rec.slot, "settlement after the certificate cleared");
    if (std::fabs(out.seller_payout + out.operator_fee + out.buyer_refund - params.price) > 1e-9)
      fail(rec.slot, "payment components do not add up to the price");
    if (rec.rating == -1) {
      rep.refunded_sales++;
      if (std::fabs(out.buyer_refund - params.price) > 1e-12)
        fail(rec.slot, "refund is not the full price");
      if (std::fabs(out.deposit_deduction + out.supplemental_payment - cs) > 1e-9)
        fail(rec.slot, "return cost not covered by deposit plus supplement");
      if (out.deposit_deduction > deposit + 1e-9)
        fail(rec.slot, "deducted more than the deposit held");
      if (std::fabs(rec.deposit_after - (deposit - out.deposit_deduction)) > 1e-9)
        fail(rec.slot, "deposit ledger mismatch");
      deposit = rec.deposit_after;
      slot_loss += out.deposit_deduction + out.supplemental_payment;
      slot_negatives++;
      rep.total_deposit_deductions += out.deposit_deduction;
      rep.total_supplements += out.supplemental_payment;
      if (rec.status_after == CertificateStatus::Revoked && !saw_expired) {
        if (!deposit_revocation && rec.deposit_after > policy.revoke_threshold + 1e-9)
          fail(rec.slot, "revoked above the deposit threshold");
        deposit_revocation = true;
      }
    } else {
      if (out.buyer_refund != 0.0 || out.deposit_deduction != 0.0 ||
          out.supplemental_payment != 0.0)
        fail(rec.slot, "charges on a sale that was not returned");
      if (std::fabs(out.operator_fee - params.fee()) > 1e-12) fail(rec.slot, "fee mismatch");
      if (std::fabs(rec.deposit_after - deposit) > 1e-9)
        fail(rec.slot, "deposit moved without a return");
    }
  }
  flush_slot();

  if (saw_revoked) {
    if (deposit_revocation) {
      rep.revoked_by_deposit++;
    } else {
      rep.revoked_by_consistency++;
      // A consistency revocation must coincide with the profile actually
      // breaching theta; recompute from the feedback stream.
      double revoked_at = -1.0;
      for (const auto& state : traj.certificate_history)
        if (state.status == CertificateStatus::Revoked) revoked_at = state.left_active_at;
      Profile prof;
      bool breach_found = false;
      for (std::size_t i = 0; i < traj.slot_feedback.size(); ++i) {
        prof = update_profile(prof, traj.slot_feedback[i]);
        const double boundary = (static_cast<double>(i) + 1.0) * d;
        if (boundary > revoked_at + 1e-9) break;
        const long long total = prof.positive + prof.neutral + prof.negative;
        if (std::fabs(boundary - revoked_at) <= 1e-9) {
          breach_found =
              total > 0 && positive_fraction(prof) < params.consistency_theta;
          break;
        }
      }
      if (!breach_found) fail(-1, "consistency revocation without a theta breach");
    }
  }
  if (saw_expired) rep.expired++;

  if (expected_rating == 1) {
    // Honest seller: nothing may touch the deposit and it comes back whole.
    if (traj.supplemental_payments != 0.0) fail(-1, "honest run paid supplements");
    if (deposit != policy.deposit) fail(-1, "honest run lost deposit");
    if (final_refund < 0.0)
      fail(-1, "certificate never cleared within the horizon");
    else if (final_refund != policy.deposit)
      fail(-1, "honest run did not get the full deposit back");
  } else if (final_refund >= 0.0) {
    if (std::fabs(final_refund - deposit) > 1e-9)
      fail(-1, "cleared refund does not match the residual deposit");
  }
}

}  // namespace

AuditReport adversarial_protocol_audit(const MarketParams& params, const InsurancePolicy& policy,
                                       const SimConfig& config) {
  validate_market(params);
  validate_policy(policy, params);
  if (config.regime == Regime::Baseline)
    throw config_error("the protocol audit requires an insured regime");

  SimConfig cfg = config;
  cfg.policy = policy;
  cfg.record_settlements = true;
  cfg.analytic_tail = false;
  if (cfg.horizon_slots == 0) {
    const double d = params.slot_length;
    cfg.horizon_slots = std::max(patience_slots(params) + 2,
                                 slot_index(policy.duration + policy.clearing, d) + 2);
  }
  check_config(params, cfg);
  const int expected_rating = expected_rating_for(params, cfg);

  AuditReport rep;
  rep.runs = cfg.runs;
  for (long long run = 0; run < cfg.runs; ++run) {
    SellerTrajectory traj;
    try {
      traj = simulate_seller(params, cfg, run);
    } catch (const std::exception& e) {
      if (rep.failures.size() < 64) {
        std::ostringstream msg;
        msg << "run " << run << ": simulation aborted: " << e.what();
        rep.failures.push_back(msg.str());
      }
      continue;
    }
    audit_trajectory(params, policy, traj, run, expected_rating, rep);
  }
  rep.passed = rep.failures.empty();
  return rep;
}

}  // namespace repsim
