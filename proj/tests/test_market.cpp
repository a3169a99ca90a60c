#include <doctest.h>

#include <string>
#include <vector>

#include "repsim/errors.hpp"
#include "repsim/market.hpp"
#include "test_configs.hpp"

using repsim::AdoptionModel;
using repsim::MarketParams;
using repsim::Profile;
using repsim::SellerLabel;
using repsim::SlotFeedback;

TEST_CASE("per-transaction cash amounts are exact for the fixture markets") {
  const MarketParams ref = repsim::reference_market();
  CHECK(ref.unit_gain() == 1.0);  // (1 - 0.0625) * 1.6 - 0.5, exact in doubles
  CHECK(ref.fee() == 0.1);

  const MarketParams odd = odd_market();
  CHECK(odd.unit_gain() == 0.7);
  CHECK(odd.fee() == 0.1);
}

TEST_CASE("tabulated adoption feeds the label rates") {
  MarketParams m = repsim::reference_market();
  CHECK(m.purchase_prob_average() == 0.02);
  CHECK(m.purchase_prob_reputable() == 0.1);
  CHECK(m.rate_average() == doctest::Approx(20.0 * 0.02).epsilon(1e-15));
  CHECK(m.rate_reputable() == doctest::Approx(50.0 * 0.1).epsilon(1e-15));
  CHECK(repsim::transaction_rate(SellerLabel::Average, m) == m.rate_average());
  CHECK(repsim::transaction_rate(SellerLabel::Reputable, m) == m.rate_reputable());
  CHECK(repsim::transaction_rate(SellerLabel::Insured, m) == m.rate_reputable());
}

TEST_CASE("functional adoption derives purchase probabilities from quality and price") {
  MarketParams m = repsim::reference_market();
  m.adoption.model = AdoptionModel::Functional;
  m.price = 0.5;
  // Unproven sellers are discounted to beta * advertised quality.
  CHECK(m.purchase_prob_average() == doctest::Approx(0.5 * 0.8 * (1.0 - 0.5)).epsilon(1e-15));
  CHECK(m.purchase_prob_reputable() == doctest::Approx(0.8 * (1.0 - 0.5)).epsilon(1e-15));

  m.price = 5.0;  // 1 - price < 0 clamps to zero demand
  CHECK(m.purchase_prob_average() == 0.0);
  CHECK(m.purchase_prob_reputable() == 0.0);
  const auto warnings = repsim::validate_market(m);
  bool mentions_price = false;
  for (const auto& w : warnings) mentions_price |= w.find("price above 1") != std::string::npos;
  CHECK(mentions_price);
}

TEST_CASE("feedback rating bands") {
  CHECK(repsim::feedback_rating(0.8, 0.8, 0.1) == 1);
  CHECK(repsim::feedback_rating(0.95, 0.8, 0.1) == 1);
  CHECK(repsim::feedback_rating(0.78, 0.8, 0.1) == 0);
  CHECK(repsim::feedback_rating(0.7, 0.8, 0.05) == -1);
  CHECK(repsim::feedback_rating(0.2, 0.8, 0.1) == -1);
}

TEST_CASE("profile updates accumulate and the positive fraction handles emptiness") {
  Profile p;
  CHECK(repsim::positive_fraction(p) == 0.0);

  p = repsim::update_profile(p, SlotFeedback{3, 1, 1});
  CHECK(p.score == 2);
  CHECK(p.positive == 3);
  CHECK(p.neutral == 1);
  CHECK(p.negative == 1);
  CHECK(repsim::positive_fraction(p) == doctest::Approx(0.6).epsilon(1e-15));

  p = repsim::update_profile(p, SlotFeedback{0, 0, 2});
  CHECK(p.score == 0);
  CHECK(repsim::positive_fraction(p) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("reputable requires both the score and the consistency floor") {
  Profile strong{100, 100, 0, 0};
  CHECK(repsim::is_reputable(strong, 100, 0.9));
  CHECK_FALSE(repsim::is_reputable(strong, 101, 0.9));

  Profile inconsistent{100, 150, 0, 50};  // fraction 0.75
  CHECK_FALSE(repsim::is_reputable(inconsistent, 100, 0.9));
  CHECK(repsim::is_reputable(inconsistent, 100, 0.75));

  Profile empty;
  CHECK_FALSE(repsim::is_reputable(empty, 1, 0.0));  // empty profile never qualifies
}

TEST_CASE("estimated quality discounts unproven sellers") {
  const MarketParams m = repsim::reference_market();
  Profile empty;
  CHECK(repsim::estimated_quality(empty, m) == doctest::Approx(0.5 * 0.8).epsilon(1e-15));
  Profile proven{100, 100, 0, 0};
  CHECK(repsim::estimated_quality(proven, m) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("market validation rejects hard violations") {
  auto breaks = [](auto mutate) {
    MarketParams m = repsim::reference_market();
    mutate(m);
    CHECK_THROWS_AS(repsim::validate_market(m), repsim::config_error);
  };
  breaks([](MarketParams& m) { m.price = -1.0; });
  breaks([](MarketParams& m) { m.fee_fraction = 1.5; });
  breaks([](MarketParams& m) { m.advertised_quality = 0.7; });  // below intrinsic
  breaks([](MarketParams& m) { m.reputation_threshold = 0; });
  breaks([](MarketParams& m) { m.arrival_before = 60.0; });  // must stay below arrival_after
  breaks([](MarketParams& m) { m.patience = 100.0; });       // not a whole number of slots
  breaks([](MarketParams& m) { m.gain_discount = 0.0; });
  breaks([](MarketParams& m) { m.gain_discount = 1.5; });
  breaks([](MarketParams& m) { m.adoption.prob_average = -0.1; });
  breaks([](MarketParams& m) { m.consistency_theta = 1.0001; });
}

TEST_CASE("negative per-transaction gain is a warning, not an error") {
  MarketParams m = repsim::reference_market();
  m.cost = 2.0;
  const auto warnings = repsim::validate_market(m);
  REQUIRE_FALSE(warnings.empty());
  CHECK(warnings.front().find("negative") != std::string::npos);
}
