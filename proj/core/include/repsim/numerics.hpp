#pragma once

#include <functional>
#include <limits>

#include "repsim/errors.hpp"

namespace repsim {

// Poisson distribution parameterized by its mean (>= 0).
struct PoissonDist {
  double mean = 0.0;
};

// Geometric per-slot discounting: factor delta applied once per slot of
// slot_length days.
struct DiscountSpec {
  double delta = 1.0;
  double slot_length = 1.0;
};

// Sentinel upper slot index meaning "sum to infinity".
inline constexpr long long kInfiniteSlot = std::numeric_limits<long long>::max();

// P[X = k] for X ~ Poisson(mean). Zero for k < 0. Evaluated directly for
// small k and mean, in log space otherwise so extreme tails stay finite.
double poisson_pmf(long long k, double mean);

// P[X <= k]. One for mean 0, zero for k < 0. Large arguments go through the
// regularized incomplete gamma function rather than a term-by-term sum.
double poisson_cdf(long long k, double mean);

// P[X > k], computed directly (never as 1 - cdf) so tiny tails keep full
// relative precision.
double poisson_tail(long long k, double mean);

inline double pmf(const PoissonDist& dist, long long k) { return poisson_pmf(k, dist.mean); }
inline double cdf(const PoissonDist& dist, long long k) { return poisson_cdf(k, dist.mean); }
inline double tail(const PoissonDist& dist, long long k) { return poisson_tail(k, dist.mean); }

// Sum of delta^s over integer slots s in [from_slot, to_slot]. Pass
// kInfiniteSlot to sum to infinity (requires delta < 1). Zero when the range
// is empty. Requires 0 < delta <= 1 and from_slot >= 0.
double discounted_slot_sum(double delta, long long from_slot, long long to_slot);

// E[delta^ceil(t / slot_length)] for t uniform on (t_lo, t_hi): the expected
// discount carried by a transaction landing at a uniform time in the window.
// Requires 0 <= t_lo < t_hi.
double uniform_ceil_discount_mean(double delta, double slot_length, double t_lo, double t_hi);

inline double uniform_ceil_discount_mean(const DiscountSpec& spec, double t_lo, double t_hi) {
  return uniform_ceil_discount_mean(spec.delta, spec.slot_length, t_lo, t_hi);
}

// Density of the arrival time of the shape-th event of a Poisson process with
// the given rate: rate^shape * t^(shape-1) * exp(-rate*t) / (shape-1)!.
// Requires shape >= 1 and rate > 0; zero for t < 0.
double erlang_pdf(long long shape, double rate, double t);

// ceil(t / slot_length) as an integer; 0 for t <= 0.
long long slot_index(double t, double slot_length);

// Adaptive Gauss-Kronrod quadrature of f over [lo, hi] to roughly abs_tol
// absolute error. Piecewise-smooth integrands converge; a non-finite
// integrand value raises evaluation_error.
double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    double abs_tol = 1e-10);

}  // namespace repsim
