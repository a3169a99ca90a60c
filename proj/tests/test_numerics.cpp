#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "repsim/errors.hpp"
#include "repsim/numerics.hpp"

using repsim::discounted_slot_sum;
using repsim::erlang_pdf;
using repsim::integrate_1d;
using repsim::kInfiniteSlot;
using repsim::poisson_cdf;
using repsim::poisson_pmf;
using repsim::poisson_tail;
using repsim::slot_index;
using repsim::uniform_ceil_discount_mean;

TEST_CASE("poisson point and tail anchors") {
  CHECK(poisson_pmf(2, 2.0) == doctest::Approx(0.2706705664732254).epsilon(1e-12));
  CHECK(poisson_pmf(150, 180.0) == doctest::Approx(0.0022960197104009662).epsilon(1e-12));
  CHECK(poisson_cdf(199, 180.0) == doctest::Approx(0.92514196501584045).epsilon(1e-12));
  CHECK(poisson_cdf(99, 54.0) == doctest::Approx(0.99999998605384766).epsilon(1e-12));
  CHECK(poisson_cdf(149, 108.0) == doctest::Approx(0.99992366545908884).epsilon(1e-12));
  CHECK(poisson_tail(199, 180.0) == doctest::Approx(0.074858034984159549).epsilon(1e-12));
  CHECK(poisson_cdf(9999, 1e4) == doctest::Approx(0.49867019166004478).epsilon(1e-12));
}

TEST_CASE("poisson edge semantics") {
  CHECK(poisson_pmf(-1, 3.0) == 0.0);
  CHECK(poisson_pmf(0, 0.0) == 1.0);
  CHECK(poisson_pmf(3, 0.0) == 0.0);
  CHECK(poisson_cdf(-1, 3.0) == 0.0);
  CHECK(poisson_cdf(0, 0.0) == 1.0);
  CHECK(poisson_cdf(7, 0.0) == 1.0);
  CHECK(poisson_tail(-1, 3.0) == 1.0);
  CHECK(poisson_tail(7, 0.0) == 0.0);
}

TEST_CASE("poisson cdf plus tail is one near the bulk") {
  for (double mean : {0.7, 12.0, 180.0, 2500.0}) {
    const long long k = static_cast<long long>(mean);
    CHECK(poisson_cdf(k, mean) + poisson_tail(k, mean) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

// Multiprecision recurrence oracle: p_0 = exp(-mean), p_{k+1} = p_k * mean/(k+1).
// The full sweep lives in the acceptance suite; this is the fast screen.
TEST_CASE("poisson agrees with a 100-digit recurrence") {
  using big = boost::multiprecision::cpp_bin_float_100;
  for (double mean : {0.5, 3.3, 30.0, 1000.0}) {
    const long long kmax =
        static_cast<long long>(mean + 8.0 * std::sqrt(mean) + 10.0);
    big p = exp(big(-mean));
    big cdf = p;
    for (long long k = 0; k <= kmax; ++k) {
      if (k > 0) {
        p *= big(mean) / k;
        cdf += p;
      }
      const double p_ref = static_cast<double>(p);
      const double c_ref = static_cast<double>(cdf);
      if (p_ref > 1e-280) {
        CHECK(poisson_pmf(k, mean) == doctest::Approx(p_ref).epsilon(1e-11));
      }
      if (c_ref > 1e-280) {
        CHECK(poisson_cdf(k, mean) == doctest::Approx(c_ref).epsilon(1e-11));
      }
      const double t_ref = static_cast<double>(big(1) - cdf);
      if (t_ref > 1e-12) {  // 1 - cdf in the oracle loses precision below this
        CHECK(poisson_tail(k, mean) == doctest::Approx(t_ref).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("discounted slot sum anchors and identities") {
  CHECK(discounted_slot_sum(0.99, 1, 60) == doctest::Approx(44.831492403314606).epsilon(1e-13));
  CHECK(discounted_slot_sum(0.95, 0, kInfiniteSlot) ==
        doctest::Approx(19.999999999999982).epsilon(1e-14));
  CHECK(discounted_slot_sum(0.9, 5, 4) == 0.0);
  CHECK(discounted_slot_sum(1.0, 3, 17) == 15.0);

  double direct = 0.0;
  for (long long s = 3; s <= 17; ++s) direct += std::pow(0.9, static_cast<double>(s));
  CHECK(discounted_slot_sum(0.9, 3, 17) == doctest::Approx(direct).epsilon(1e-14));

  CHECK_THROWS_AS(discounted_slot_sum(1.0, 0, kInfiniteSlot), std::domain_error);
  CHECK_THROWS_AS(discounted_slot_sum(0.0, 0, 3), std::domain_error);
  CHECK_THROWS_AS(discounted_slot_sum(0.9, -1, 3), std::domain_error);
}

TEST_CASE("uniform ceil discount mean anchors") {
  CHECK(uniform_ceil_discount_mean(0.99, 3.0, 0.0, 180.0) ==
        doctest::Approx(0.74719154005524335).epsilon(1e-13));
  CHECK(uniform_ceil_discount_mean(0.99, 3.0, 40.0, 97.3) ==
        doctest::Approx(0.79177814887992559).epsilon(1e-13));
  CHECK(uniform_ceil_discount_mean(0.97, 2.5, 1.2, 1.9) ==
        doctest::Approx(0.97).epsilon(1e-14));  // window inside a single slot
  CHECK(uniform_ceil_discount_mean(0.99, 3.0, 97.0, 99.0) ==
        doctest::Approx(0.71773053259827491).epsilon(1e-13));
  CHECK_THROWS_AS(uniform_ceil_discount_mean(0.99, 3.0, 5.0, 5.0), std::domain_error);
}

TEST_CASE("uniform ceil discount mean matches direct quadrature") {
  // Independent evaluation: integrate delta^slot(t) over the window. The
  // integrand is a step function, so the adaptive rule only reaches ~1e-5
  // around the jumps; the closed form is held to that.
  const double delta = 0.93, d = 2.3, lo = 0.7, hi = 9.1;
  const double integral = integrate_1d(
      [&](double t) { return std::pow(delta, static_cast<double>(slot_index(t, d))); }, lo, hi,
      1e-10);
  const double expected = integral / (hi - lo);
  CHECK(uniform_ceil_discount_mean(delta, d, lo, hi) ==
        doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("erlang density anchors") {
  CHECK(erlang_pdf(2, 1.0, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-13));
  CHECK(erlang_pdf(100, 0.2, 500.0) == doctest::Approx(0.007972199361829857).epsilon(1e-12));
  CHECK(erlang_pdf(1, 2.0, 0.0) == 2.0);
  CHECK(erlang_pdf(2, 2.0, 0.0) == 0.0);
  CHECK(erlang_pdf(5, 2.0, -1.0) == 0.0);
  CHECK_THROWS_AS(erlang_pdf(0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(erlang_pdf(3, 0.0, 1.0), std::domain_error);
}

TEST_CASE("erlang cdf equals the poisson tail of the arrival count") {
  // P[k-th arrival <= t] == P[Poisson(rate*t) >= k].
  const long long k = 2;
  const double rate = 0.8, t = 3.7;
  const double via_integral =
      integrate_1d([&](double x) { return erlang_pdf(k, rate, x); }, 0.0, t, 1e-12);
  CHECK(via_integral == doctest::Approx(poisson_tail(k - 1, rate * t)).epsilon(1e-9));
}

TEST_CASE("erlang density normalizes to one") {
  for (auto [shape, rate] : std::vector<std::pair<long long, double>>{
           {1, 0.5}, {5, 2.5}, {100, 0.2}}) {
    const double mean = static_cast<double>(shape) / rate;
    const double upper = 8.0 * mean + 60.0 / rate;
    const double mass = integrate_1d(
        [shape = shape, rate = rate](double t) { return erlang_pdf(shape, rate, t); }, 0.0,
        upper, 1e-10);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("slot index") {
  CHECK(slot_index(-2.0, 3.0) == 0);
  CHECK(slot_index(0.0, 3.0) == 0);
  CHECK(slot_index(0.1, 3.0) == 1);
  CHECK(slot_index(3.0, 3.0) == 1);
  CHECK(slot_index(3.0000001, 3.0) == 2);
  CHECK(slot_index(4.5, 1.5) == 3);
  CHECK(slot_index(4.50000001, 1.5) == 4);
}

TEST_CASE("quadrature handles a step integrand and flags a bad one") {
  const double step = integrate_1d(
      [](double t) { return std::pow(0.9, static_cast<double>(slot_index(t, 3.0))); }, 0.0, 6.0,
      1e-10);
  CHECK(step == doctest::Approx(5.13).epsilon(1e-4));  // 3*(0.9 + 0.81)

  CHECK_THROWS_AS(integrate_1d(
                      [](double t) {
                        return t < 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
                      },
                      0.0, 1.0),
                  repsim::evaluation_error);
}
