#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fracsync/diffusion.hpp"
#include "fracsync/drift.hpp"
#include "fracsync/noise_path.hpp"

namespace fracsync {

/// Values of R below this are treated as collapsed and end the decay fit.
inline constexpr double kSyncFloor = 1e-12;

struct SyncReport {
  std::vector<double> times;
  /// R(t): largest pairwise distance among the tracked points.
  std::vector<double> r_series;
  /// Fitted rate in log R(t) ~ a - decay_rate * t over the final third.
  double decay_rate = 0.0;
  double fit_r2 = 0.0;
  /// False when fewer than three usable points remained for the fit.
  bool has_fit = false;
  double initial_r = 0.0;
  double final_r = 0.0;
  int n_points = 0;
  double c_bound = 0.0;
  /// A blow-up ended the run early; the series stops at abort_time.
  bool aborted = false;
  double abort_time = 0.0;
};

struct AtomEstimate {
  std::vector<Vec> centers;
  std::vector<double> weights;
  int p_hat = 0;
  double cluster_radius = 0.0;
  /// Two centers closer than 2 * cluster_radius.
  bool ambiguous = false;
  double max_center_distance = 0.0;
  std::vector<Vec> endpoints;
};

struct AttractorEstimate {
  std::vector<Vec> sample_points;
  double diameter = 0.0;
  double t_back = 0.0;
  int n_initials = 0;
};

struct ErgodicReport {
  double time_avg = 0.0;
  double ensemble_avg = 0.0;
  double gap = 0.0;
  double time_se = 0.0;
  double ensemble_se = 0.0;
};

/// Largest pairwise distance.
double max_pairwise_distance(const std::vector<Vec>& points);

/// Integrates every initial state under the same driver on [0, horizon].
SyncReport n_point_motion(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver,
                          const std::vector<Vec>& initials, double horizon, std::size_t record_stride = 1);

/// Single-linkage clusters of `points` at threshold `radius`.
AtomEstimate cluster_points(const std::vector<Vec>& points, double radius);

/// Pullback endpoints over [-t_back, 0] clustered into atoms.
AtomEstimate estimate_atoms(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver,
                            const std::vector<Vec>& initials, double t_back, double cluster_radius);

/// Pullback images of `n_initials` Halton points of B(0, ball_radius), one
/// estimate per entry of the schedule, all on the same driver.
std::vector<AttractorEstimate> attractor_diameter(const DriftModel& drift, const DiffusionMatrix& sigma,
                                                  const NoisePath& driver, double ball_radius, int n_initials,
                                                  const std::vector<double>& t_back_schedule);

struct ErgodicConfig {
  double horizon = 50.0;
  int n_realizations = 64;
  double dt = 1e-2;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Time average of `test_fn` along forward paths from x0 against its
/// average over pullback endpoints at t_back = horizon.
ErgodicReport ergodic_average_check(const DriftModel& drift, const DiffusionMatrix& sigma, double h,
                                    const std::function<double(const Vec&)>& test_fn, const Vec& x0,
                                    const ErgodicConfig& config);

}  // namespace fracsync
