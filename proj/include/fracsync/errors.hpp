#pragma once

#include <stdexcept>
#include <string>

namespace fracsync {

/// A caller broke a documented precondition (bad grid, wrong path kind, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Noise generation failed for every available method.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The state left the finite range (or the blow-up ball) during integration.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_finite_time)
      : std::runtime_error(what), last_finite_time_(last_finite_time) {}

  double last_finite_time() const noexcept { return last_finite_time_; }

 private:
  double last_finite_time_;
};

/// A Monte Carlo estimator could not produce a trustworthy value.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace fracsync
