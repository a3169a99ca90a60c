#include "repsim/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace repsim {

namespace {

// Below this, pmf/cdf are evaluated by the plain recurrence; above, through
// log space / the incomplete gamma function. Keeps small cases exact and
// large cases overflow-free.
constexpr double kDirectLimit = 30.0;

void check_mean(double mean) {
  if (!(mean >= 0.0)) throw std::domain_error("poisson mean must be nonnegative");
}

}  // namespace

double poisson_pmf(long long k, double mean) {
  check_mean(mean);
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  if (k <= kDirectLimit && mean <= kDirectLimit) {
    double p = std::exp(-mean);
    for (long long i = 1; i <= k; ++i) p *= mean / static_cast<double>(i);
    return p;
  }
  double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

double poisson_cdf(long long k, double mean) {
  check_mean(mean);
  if (k < 0) return 0.0;
  if (mean == 0.0) return 1.0;
  if (k <= kDirectLimit && mean <= kDirectLimit) {
    double term = std::exp(-mean);
    double sum = term;
    for (long long i = 1; i <= k; ++i) {
      term *= mean / static_cast<double>(i);
      sum += term;
    }
    return sum < 1.0 ? sum : 1.0;
  }
  // P[X <= k] = Q(k+1, mean), the regularized upper incomplete gamma.
  return boost::math::gamma_q(static_cast<double>(k) + 1.0, mean);
}

double poisson_tail(long long k, double mean) {
  check_mean(mean);
  if (k < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  // P[X > k] = P(k+1, mean), the regularized lower incomplete gamma.
  return boost::math::gamma_p(static_cast<double>(k) + 1.0, mean);
}

double discounted_slot_sum(double delta, long long from_slot, long long to_slot) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("discount must be in (0, 1]");
  if (from_slot < 0) throw std::domain_error("slot range must start at 0 or later");
  if (to_slot < from_slot) return 0.0;
  if (to_slot == kInfiniteSlot) {
    if (delta == 1.0) throw std::domain_error("undiscounted infinite slot sum diverges");
    return std::pow(delta, static_cast<double>(from_slot)) / (1.0 - delta);
  }
  if (delta == 1.0) return static_cast<double>(to_slot - from_slot + 1);
  return (std::pow(delta, static_cast<double>(from_slot)) -
          std::pow(delta, static_cast<double>(to_slot) + 1.0)) /
         (1.0 - delta);
}

double uniform_ceil_discount_mean(double delta, double slot_length, double t_lo, double t_hi) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("discount must be in (0, 1]");
  if (!(slot_length > 0.0)) throw std::domain_error("slot length must be positive");
  if (!(t_lo >= 0.0) || !(t_hi > t_lo)) {
    throw std::domain_error("window must satisfy 0 <= t_lo < t_hi");
  }
  const double d = slot_length;
  // First and last slot indices hit by the window.
  const long long s_first = static_cast<long long>(std::floor(t_lo / d)) + 1;
  const long long s_last = slot_index(t_hi, d);
  if (s_first >= s_last) {
    // Window inside a single slot: the discount is constant on it.
    return std::pow(delta, static_cast<double>(s_last));
  }
  double total = (static_cast<double>(s_first) * d - t_lo) *
                 std::pow(delta, static_cast<double>(s_first));
  if (s_last - 1 >= s_first + 1) {
    total += d * discounted_slot_sum(delta, s_first + 1, s_last - 1);
  }
  total += (t_hi - static_cast<double>(s_last - 1) * d) *
           std::pow(delta, static_cast<double>(s_last));
  return total / (t_hi - t_lo);
}

double erlang_pdf(long long shape, double rate, double t) {
  if (shape < 1) throw std::domain_error("erlang shape must be at least 1");
  if (!(rate > 0.0)) throw std::domain_error("erlang rate must be positive");
  if (t < 0.0) return 0.0;
  if (t == 0.0) return shape == 1 ? rate : 0.0;
  const double kd = static_cast<double>(shape);
  return std::exp(std::log(rate) - rate * t + (kd - 1.0) * std::log(rate * t) -
                  std::lgamma(kd));
}

long long slot_index(double t, double slot_length) {
  if (!(slot_length > 0.0)) throw std::domain_error("slot length must be positive");
  if (t <= 0.0) return 0;
  return static_cast<long long>(std::ceil(t / slot_length));
}

double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    double abs_tol) {
  if (!(hi > lo)) return 0.0;
  auto checked = [&f](double t) {
    double v = f(t);
    if (!std::isfinite(v)) {
      throw evaluation_error("integrand returned a non-finite value");
    }
    return v;
  };
  double error = 0.0;
  double l1 = 0.0;
  // The tolerance argument is relative to the L1 norm; translate the absolute
  // request against the interval in case the integrand is tiny everywhere.
  double rel = abs_tol / std::max(1.0, hi - lo);
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      checked, lo, hi, 15, rel, &error, &l1);
}

}  // namespace repsim
