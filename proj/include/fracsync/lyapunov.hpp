#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fracsync/diffusion.hpp"
#include "fracsync/drift.hpp"

namespace fracsync {

struct LyapunovConfig {
  double horizon = 200.0;
  /// Negative means the default max(20, 5 / c2f).
  double burn_in = -1.0;
  double renorm_interval = 1.0;
  int n_realizations = 64;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  /// Initial states are uniform in B(0, x0_radius); 0 picks sqrt(C^F / c2f) capped at 100.
  double x0_radius = 0.0;
  /// Run the noise-free flow (sigma is ignored).
  bool deterministic = false;
  int threads = 0;
};

struct LyapunovEstimate {
  double lambda1 = 0.0;
  double std_err = 0.0;
  int n_realizations = 0;
  int n_dropped = 0;
  double burn_in = 0.0;
  double horizon = 0.0;
  double renorm_interval = 0.0;
  std::vector<double> per_realization;

  /// Two-sided normal confidence interval at `level` (0.99 by default).
  double ci_low(double level = 0.99) const;
  double ci_high(double level = 0.99) const;
};

/// Resolves the burn-in default against the drift constants.
double effective_burn_in(const LyapunovConfig& config, const DriftModel& drift);

/// Top Lyapunov exponent from the variational flow of a unit tangent vector.
/// The tangent is renormalized every renorm_interval throughout; log growth
/// is accumulated only after the burn-in. Realizations that blow up are
/// dropped; more than 20% drops raise EstimationError.
LyapunovEstimate estimate_lambda1(const DriftModel& drift, const DiffusionMatrix& sigma, double h,
                                  const LyapunovConfig& config);

struct SweepPoint {
  double kappa = 0.0;
  LyapunovEstimate estimate;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// Smallest kappa whose 99% interval lies strictly below zero.
  std::optional<std::size_t> flagged;
};

/// estimate_lambda1 with sigma = kappa I for each kappa (sorted ascending).
/// Every kappa reuses the same noise seeds.
SweepResult lambda1_sigma_sweep(const DriftModel& drift, double h, const std::vector<double>& kappas,
                                const LyapunovConfig& config);

/// Two-trajectory estimate: the perturbed state is pulled back to distance
/// epsilon every renorm_interval and the log stretch factors are averaged.
/// A separation below 1e-14 raises EstimationError.
LyapunovEstimate fd_lyapunov_crosscheck(const DriftModel& drift, const DiffusionMatrix& sigma, double h,
                                        const LyapunovConfig& config, double epsilon);

}  // namespace fracsync
