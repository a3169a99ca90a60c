#pragma once

#include <stdexcept>

namespace repsim {

// An infinite series or expectation failed to converge within its iteration
// budget (for example a ramp-up expectation at a vanishing transaction rate).
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration: unknown key, malformed value, or a
// parameter combination that violates a model invariant.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Certificate or settlement state machine misuse, e.g. settling a
// transaction against a certificate that has already cleared.
class protocol_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An integrand returned a non-finite value during quadrature.
class evaluation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The simulation horizon ended before the quantity of interest was observed;
// the message lists the affected runs.
class horizon_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace repsim
