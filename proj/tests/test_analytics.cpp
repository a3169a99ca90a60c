#include <doctest.h>

#include <cmath>

#include "repsim/baseline_analytics.hpp"
#include "repsim/errors.hpp"
#include "repsim/numerics.hpp"
#include "test_configs.hpp"

using repsim::AnalyticOptions;
using repsim::BaselineMeasures;
using repsim::GainMethod;
using repsim::MarketParams;

namespace {

// Frozen closed-form values for the reference market (independent prototype
// of the same formulas). Rows: reputation_threshold 200, 150, 100.
constexpr long long kThresholds[3] = {200, 150, 100};

// arrival_before in {5, 10, 15, 20, 25}, adoption_before = 0.02.
constexpr double kRampDays[3][5] = {
    {2001.4999999999745, 1001.4999999999884, 668.1666666666606, 501.49999999999596,
     401.49999999999653},
    {1501.4999999999795, 751.49999999998977, 501.49999999999591, 376.49999999999596,
     301.49999999999761},
    {1001.4999999999839, 501.49999999999295, 334.83333333332956, 251.49999999999764,
     201.4999999999975},
};

// adoption_before in {0.01 .. 0.05}, arrival_before = 20.
constexpr double kDropProb[3][5] = {
    {1.0, 1.0, 0.99999999999999833, 0.9999940809958564, 0.92514196501584045},
    {1.0, 0.99999999999999933, 0.99992366545908884, 0.68056309993217001,
     0.0099101185724333671},
    {1.0, 0.99896644526581313, 0.20818509636949686, 4.5305721647696259e-05,
     2.9482945576483209e-11},
};

// adoption_before in {0.01 .. 0.05}, arrival_before = 20.
constexpr double kSellerGain[3][5] = {
    {26.89889544198876, 53.79779088397752, 80.696686325967619, 107.60041392659961,
     196.04714776728827},
    {26.89889544198876, 53.797790883978102, 80.759170890822787, 373.0994867919141,
     1004.8320051844352},
    {26.89889544198876, 54.648308654316637, 759.83974003761887, 1054.7819008576496,
     1143.0295244771471},
};

}  // namespace

TEST_CASE("expected ramp-up days match the frozen closed forms") {
  const double lambdas[5] = {5, 10, 15, 20, 25};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) {
      const MarketParams m = ref_market(lambdas[c], 0.02, kThresholds[r]);
      CHECK(repsim::expected_ramp_up_time(m) ==
            doctest::Approx(kRampDays[r][c]).epsilon(kSeriesRel));
    }
  }
}

TEST_CASE("drop-out probabilities match the frozen closed forms") {
  const double adoptions[5] = {0.01, 0.02, 0.03, 0.04, 0.05};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) {
      const MarketParams m = ref_market(20.0, adoptions[c], kThresholds[r]);
      CHECK(repsim::drop_out_probability(m) ==
            doctest::Approx(kDropProb[r][c]).epsilon(kSeriesRel));
    }
  }
}

TEST_CASE("drop-out is the ramp count shortfall over the patience window") {
  const MarketParams m = ref_market(20.0, 0.03, 100);
  const double mean = m.rate_average() * m.patience;
  CHECK(repsim::drop_out_probability(m) ==
        doctest::Approx(repsim::poisson_cdf(m.reputation_threshold - 1, mean))
            .epsilon(1e-15));
}

TEST_CASE("seller gains match the frozen closed forms") {
  const double adoptions[5] = {0.01, 0.02, 0.03, 0.04, 0.05};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) {
      const MarketParams m = ref_market(20.0, adoptions[c], kThresholds[r]);
      const BaselineMeasures bm = repsim::baseline_measures(m);
      CHECK(bm.seller_gain == doctest::Approx(kSellerGain[r][c]).epsilon(kQuadRel));
      // Operator gain is proportional to the seller gain, bit-exactly.
      CHECK(bm.operator_gain == (m.fee() / m.unit_gain()) * bm.seller_gain);
    }
  }
}

TEST_CASE("all four measures come back consistent from the bundle call") {
  const MarketParams m = ref_market(20.0, 0.03, 100);
  const BaselineMeasures bm = repsim::baseline_measures(m);
  CHECK(bm.ramp_up == doctest::Approx(repsim::expected_ramp_up_time(m)).epsilon(1e-15));
  CHECK(bm.drop_out == doctest::Approx(repsim::drop_out_probability(m)).epsilon(1e-15));
  CHECK(bm.seller_gain ==
        doctest::Approx(repsim::long_term_profit(m, GainMethod::ReducedQuadrature).value)
            .epsilon(1e-15));
}

TEST_CASE("odd market closed forms") {
  const MarketParams m = odd_market();
  CHECK(repsim::expected_ramp_up_time(m) ==
        doctest::Approx(200.74999999999562).epsilon(kSeriesRel));
  CHECK(repsim::drop_out_probability(m) ==
        doctest::Approx(0.99999996942057268).epsilon(kSeriesRel));
  CHECK(repsim::long_term_profit(m, GainMethod::ReducedQuadrature).value ==
        doctest::Approx(5.7092723486533741).epsilon(kQuadRel));
}

TEST_CASE("ramp-up series is insensitive to the tail tolerance") {
  const MarketParams m = ref_market(20.0, 0.03, 100);
  AnalyticOptions loose;
  loose.tail_tolerance = 1e-6;
  CHECK(repsim::expected_ramp_up_time(m, loose) ==
        doctest::Approx(repsim::expected_ramp_up_time(m)).epsilon(1e-7));
}

TEST_CASE("a zero transaction rate makes the ramp diverge") {
  MarketParams m = ref_market(20.0, 0.0, 100);
  CHECK_THROWS_AS(repsim::expected_ramp_up_time(m), repsim::divergence_error);
  CHECK(repsim::drop_out_probability(m) == 1.0);
  CHECK(repsim::long_term_profit(m, GainMethod::ReducedQuadrature).value == 0.0);
}

TEST_CASE("an exhausted slot budget reports divergence instead of looping") {
  const MarketParams m = ref_market(5.0, 0.02, 200);
  AnalyticOptions opts;
  opts.max_slots = 100;
  CHECK_THROWS_AS(repsim::expected_ramp_up_time(m, opts), repsim::divergence_error);
}

TEST_CASE("an undiscounted future with a reachable reputable phase diverges") {
  MarketParams m = ref_market(20.0, 0.03, 100);
  m.gain_discount = 1.0;
  CHECK_THROWS_AS(repsim::long_term_profit(m, GainMethod::ReducedQuadrature),
                  repsim::divergence_error);
}

TEST_CASE("monte carlo profit estimate brackets the closed form") {
  const MarketParams m = ref_market(20.0, 0.03, 100);
  repsim::ProfitSimOptions sim;
  sim.runs = 3000;
  sim.seed = 1234;
  const repsim::GainEstimate mc = repsim::long_term_profit(m, GainMethod::MonteCarlo, sim);
  const repsim::GainEstimate exact =
      repsim::long_term_profit(m, GainMethod::ReducedQuadrature);
  REQUIRE(mc.std_err > 0.0);
  CHECK(std::abs(mc.value - exact.value) <= 4.0 * mc.std_err);
}

TEST_CASE("ramp-up time respects slot granularity monotonicity") {
  // Doubling the threshold cannot shorten the ramp; raising the rate cannot
  // lengthen it.
  const double base = repsim::expected_ramp_up_time(ref_market(20.0, 0.02, 100));
  CHECK(repsim::expected_ramp_up_time(ref_market(20.0, 0.02, 200)) >= base);
  CHECK(repsim::expected_ramp_up_time(ref_market(25.0, 0.02, 100)) <= base);
}
