#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fracsync/diffusion.hpp"
#include "fracsync/drift.hpp"
#include "fracsync/integrator.hpp"

namespace fracsync {

/// Radii used by the push-out argument: the critical ball R + 2C and the
/// far radius R2 (default 10 (R + C)), with C = c1f / c2f.
struct PushoutGeometry {
  double critical_radius = 0.0;
  double r2 = 0.0;
  /// sup |F| over B(0, 3 R2).
  double m_r2 = 0.0;

  static PushoutGeometry from_drift(const DriftModel& drift, double r2 = 0.0);
};

/// Control path h^v(t) = v t sigma^{-1} e_1 on [0, horizon], as a path.
NoisePath control_path(const DiffusionMatrix& sigma, double v, double horizon, double dt);

/// dY = F(Y) dt + sigma dh^v, i.e. dY = (F(Y) + v e_1) dt, via the integrator.
CocycleRun controlled_ode_run(const DriftModel& drift, const DiffusionMatrix& sigma, double v, const Vec& x0,
                              double horizon, double dt);

/// dt times the number of left nodes (all but the last) with |state| <= radius.
double occupation_time_in_ball(const CocycleRun& run, double radius);

/// One passage from entry into the critical ball to the first node with
/// x_1 >= 2 R2.
struct Excursion {
  double entry = 0.0;
  double last_inside = 0.0;
  double exit_far = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  /// max |F| along [entry, exit_far].
  double m_measured = 0.0;
  bool checked = false;
  bool within = true;
};

struct PushoutReport {
  double v = 0.0;
  double occupation_time = 0.0;
  double horizon = 0.0;
  /// Largest occupation time over the initial states.
  double worst_case_over_initials = 0.0;
  /// kappa(v, R2) with M = m_r2; infinite when v <= m_r2.
  double kappa_bound = std::numeric_limits<double>::infinity();
  double radius = 0.0;
  double r2 = 0.0;
  double m_r2 = 0.0;
  std::vector<double> per_initial;
  std::vector<Excursion> excursions;
  bool excursions_within_bound = true;
  /// x_1 increased on every step of runs that stayed where |F| < v.
  bool first_coordinate_increasing = true;
};

/// kappa(v, R2) = ((v + M) / (v - M)) * 2 rho / (2 R2 - rho) with rho = R + 2C.
double kappa_bound(double v, double m, double critical_radius, double r2);

/// Excursions of a controlled run with their ratio checks.
std::vector<Excursion> excursions(const DriftModel& drift, const CocycleRun& run, double v,
                                  const PushoutGeometry& geometry);

/// Controlled runs from every initial state at speed v.
PushoutReport pushout_report(const DriftModel& drift, const DiffusionMatrix& sigma, double v,
                             const std::vector<Vec>& initials, double horizon, double dt,
                             const PushoutGeometry& geometry);

struct ConditionedPushout {
  int attempts = 0;
  int accepted = 0;
  double acceptance_rate = 0.0;
  /// Smallest sup_t |B_t - h^v(t)| seen over all attempts.
  double min_distance = std::numeric_limits<double>::infinity();
  std::vector<double> distances;
  std::vector<PushoutReport> reports;
  /// Occupation time of the controlled ODE in the inflated ball, per initial.
  std::vector<double> control_reference;
  /// Pathwise deviation bound |sigma| delta e^{L T} used to inflate the ball.
  double deviation_bound = 0.0;
  bool no_acceptance() const noexcept { return accepted == 0; }
};

struct ConditionedConfig {
  double h = 0.5;
  double v = 1.0;
  double delta = 1.0;
  double horizon = 1.0;
  double dt = 1e-3;
  int n_attempts = 100;
  /// Accepted drivers beyond this count are tallied but not integrated.
  int max_reports = 8;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Rejection-samples fBm drivers with sup_t |B_t - h^v(t)| <= delta and
/// measures occupation times of the critical ball under accepted drivers.
ConditionedPushout conditioned_noise_pushout(const DriftModel& drift, const DiffusionMatrix& sigma,
                                             const std::vector<Vec>& initials, const ConditionedConfig& config,
                                             const PushoutGeometry& geometry);

}  // namespace fracsync
