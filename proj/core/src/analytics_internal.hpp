#pragma once

// Internal helpers shared by the closed-form measure implementations.
// Not installed.

#include <sstream>

#include "repsim/baseline_analytics.hpp"
#include "repsim/numerics.hpp"

namespace repsim::internal {

// d * sum over slots of the threshold-survival probability: E[d * ceil(t_r/d)]
// for the first passage of a counting process whose expected count by time t
// is mean_by_time(t).
template <typename MeanFn>
double ramp_up_series(long long threshold, double slot_length, MeanFn mean_by_time,
                      const AnalyticOptions& opts, const char* what) {
  double total = 0.0;
  for (long long tau = 1; tau <= opts.max_slots; ++tau) {
    const double mean = mean_by_time(static_cast<double>(tau - 1) * slot_length);
    const double survival = poisson_cdf(threshold - 1, mean);
    total += survival;
    if (survival < opts.tail_tolerance) return slot_length * total;
  }
  std::ostringstream os;
  os << what << " did not converge within " << opts.max_slots
     << " slots; the transaction rate is too small for the threshold";
  throw divergence_error(os.str());
}

}  // namespace repsim::internal
