#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fracsync {

struct NoiseValidationConfig {
  std::vector<double> hursts{0.25, 0.5, 0.75};
  std::size_t nodes = 4096;
  int paths = 4096;
  std::size_t max_lag = 10;
  /// Relative tolerance on nonzero covariances; for H = 1/2 the lags >= 1
  /// vanish and the tolerance applies to |gamma_hat(k)| / gamma(0).
  double rel_tolerance = 0.05;
  int whiteness_seeds = 100;
  std::size_t whiteness_lags = 10;
  double whiteness_level = 0.01;
  double whiteness_min_fraction = 0.95;
  double dt = 1.0;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct CovarianceCheck {
  double h = 0.0;
  std::size_t lag = 0;
  double empirical = 0.0;
  double analytic = 0.0;
  double std_err = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

struct WhitenessCheck {
  int seeds = 0;
  int passed = 0;
  double critical_value = 0.0;
  bool pass = false;
};

struct NoiseValidation {
  std::vector<CovarianceCheck> covariances;
  std::optional<WhitenessCheck> whiteness;
  bool pass = false;
};

/// Ljung-Box statistic n (n + 2) sum_k rho_k^2 / (n - k) for lags 1..lags.
double ljung_box(const std::vector<double>& series, std::size_t lags);

/// Empirical fGn covariances of sampled increments against the analytic
/// formula and, when H = 1/2 is included, a Ljung-Box whiteness batch.
NoiseValidation validate_noise(const NoiseValidationConfig& config);

}  // namespace fracsync
