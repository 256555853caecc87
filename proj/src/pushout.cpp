#include "fracsync/pushout.hpp"

#include <algorithm>
#include <cmath>

#include "fracsync/errors.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/parallel.hpp"
#include "fracsync/rng.hpp"

namespace fracsync {

PushoutGeometry PushoutGeometry::from_drift(const DriftModel& drift, double r2) {
  const double r = drift.constants().r_mono;
  const double c = drift.c_bound();
  PushoutGeometry g;
  g.critical_radius = r + 2.0 * c;
  g.r2 = r2 > 0.0 ? r2 : 10.0 * (r + c);
  require(2.0 * g.r2 > g.critical_radius, "pushout: R2 must exceed half the critical radius");
  g.m_r2 = drift.sup_norm_on_ball(3.0 * g.r2);
  return g;
}

NoisePath control_path(const DiffusionMatrix& sigma, double v, double horizon, double dt) {
  require(v > 0.0, "control path: v must be positive");
  const Grid grid = Grid::future(dt, grid_steps(horizon, dt));
  const int d = sigma.dim();
  const Vec direction = sigma.sigma_inv.col(0);
  std::vector<double> values(grid.size() * static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (int c = 0; c < d; ++c) values[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] = v * grid.time(k) * direction[c];
  }
  return NoisePath(grid, d, NoiseKind::fractional, 0.5, std::move(values));
}

CocycleRun controlled_ode_run(const DriftModel& drift, const DiffusionMatrix& sigma, double v, const Vec& x0,
                              double horizon, double dt) {
  auto driver = std::make_shared<const NoisePath>(control_path(sigma, v, horizon, dt));
  return integrate_forward(drift, sigma, std::move(driver), x0, horizon);
}

double occupation_time_in_ball(const CocycleRun& run, double radius) {
  require(radius > 0.0, "occupation time: radius must be positive");
  if (run.size() < 2) return 0.0;
  const double dt = run.times[1] - run.times[0];
  std::size_t inside = 0;
  for (std::size_t k = 0; k + 1 < run.size(); ++k) {
    if (run.state(k).norm() <= radius) ++inside;
  }
  return dt * static_cast<double>(inside);
}

double kappa_bound(double v, double m, double critical_radius, double r2) {
  if (v <= m) return std::numeric_limits<double>::infinity();
  return ((v + m) / (v - m)) * (2.0 * critical_radius / (2.0 * r2 - critical_radius));
}

std::vector<Excursion> excursions(const DriftModel& drift, const CocycleRun& run, double v,
                                  const PushoutGeometry& geometry) {
  std::vector<Excursion> out;
  const double rho = geometry.critical_radius;
  const std::size_t n = run.size();
  std::size_t cursor = 0;
  while (cursor < n) {
    std::size_t a = cursor;
    while (a < n && run.state(a).norm() > rho) ++a;
    if (a >= n) break;
    std::size_t b = a;
    while (b < n && run.state(b)[0] < 2.0 * geometry.r2) ++b;
    Excursion e;
    e.entry = run.times[a];
    if (b >= n) {
      out.push_back(e);
      break;
    }
    std::size_t last = a;
    double m = 0.0;
    for (std::size_t k = a; k <= b; ++k) {
      const Vec x = run.state(k);
      if (k < b && x[0] <= rho) last = k;
      m = std::max(m, drift.evaluate(x).norm());
    }
    e.last_inside = run.times[last];
    e.exit_far = run.times[b];
    e.m_measured = m;
    e.ratio = (e.last_inside - e.entry) / (e.exit_far - e.last_inside);
    e.bound = kappa_bound(v, m, rho, geometry.r2);
    e.checked = v > m;
    e.within = !e.checked || e.ratio <= e.bound;
    out.push_back(e);
    cursor = b + 1;
  }
  return out;
}

PushoutReport pushout_report(const DriftModel& drift, const DiffusionMatrix& sigma, double v,
                             const std::vector<Vec>& initials, double horizon, double dt,
                             const PushoutGeometry& geometry) {
  require(!initials.empty(), "pushout: no initial states");
  PushoutReport report;
  report.v = v;
  report.horizon = horizon;
  report.radius = geometry.critical_radius;
  report.r2 = geometry.r2;
  report.m_r2 = geometry.m_r2;
  report.kappa_bound = kappa_bound(v, geometry.m_r2, geometry.critical_radius, geometry.r2);
  double total = 0.0;
  for (const Vec& x0 : initials) {
    const CocycleRun run = controlled_ode_run(drift, sigma, v, x0, horizon, dt);
    const double occ = occupation_time_in_ball(run, geometry.critical_radius);
    report.per_initial.push_back(occ);
    total += occ;
    report.worst_case_over_initials = std::max(report.worst_case_over_initials, occ);

    double m = 0.0;
    for (std::size_t k = 0; k < run.size(); ++k) m = std::max(m, drift.evaluate(run.state(k)).norm());
    if (v > m) {
      for (std::size_t k = 0; k + 1 < run.size(); ++k) {
        if (!(run.state(k + 1)[0] > run.state(k)[0])) report.first_coordinate_increasing = false;
      }
    }
    for (const Excursion& e : excursions(drift, run, v, geometry)) {
      report.excursions.push_back(e);
      if (!e.within) report.excursions_within_bound = false;
    }
  }
  report.occupation_time = total / static_cast<double>(initials.size());
  return report;
}

ConditionedPushout conditioned_noise_pushout(const DriftModel& drift, const DiffusionMatrix& sigma,
                                             const std::vector<Vec>& initials, const ConditionedConfig& config,
                                             const PushoutGeometry& geometry) {
  require(config.delta > 0.0, "conditioned pushout: delta must be positive");
  require(config.n_attempts >= 1, "conditioned pushout: n_attempts must be >= 1");
  require(config.v > 0.0, "conditioned pushout: v must be positive");
  require(!initials.empty(), "conditioned pushout: no initial states");
  const int d = drift.dim();
  const Grid grid = Grid::future(config.dt, grid_steps(config.horizon, config.dt));
  const NoisePath control = control_path(sigma, config.v, config.horizon, config.dt);

  ConditionedPushout out;
  out.attempts = config.n_attempts;
  out.distances.resize(static_cast<std::size_t>(config.n_attempts));
  parallel_for(out.distances.size(), resolve_thread_count(config.threads), [&](std::size_t i) {
    const NoisePath b = sample_fbm(grid, config.h, d, seed_stream(config.seed, i));
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double sq = 0.0;
      for (int c = 0; c < d; ++c) sq += std::pow(b.at(k, c) - control.at(k, c), 2);
      worst = std::max(worst, std::sqrt(sq));
    }
    out.distances[i] = worst;
  });

  const double lipschitz = drift.constants().lipschitz;
  // Discrete Gronwall for the Heun map, with a factor 2 for the predictor stage.
  out.deviation_bound = 2.0 * sigma.op_norm * config.delta *
                        std::exp(lipschitz * config.horizon * (1.0 + lipschitz * config.dt));
  if (!std::isfinite(out.deviation_bound)) out.deviation_bound = std::numeric_limits<double>::infinity();
  for (const Vec& x0 : initials) {
    const CocycleRun run = controlled_ode_run(drift, sigma, config.v, x0, config.horizon, config.dt);
    out.control_reference.push_back(
        std::isfinite(out.deviation_bound)
            ? occupation_time_in_ball(run, geometry.critical_radius + out.deviation_bound)
            : config.horizon);
  }

  for (std::size_t i = 0; i < out.distances.size(); ++i) {
    out.min_distance = std::min(out.min_distance, out.distances[i]);
    if (!(out.distances[i] <= config.delta)) continue;
    ++out.accepted;
    if (static_cast<int>(out.reports.size()) >= config.max_reports) continue;
    auto driver = std::make_shared<const NoisePath>(sample_fbm(grid, config.h, d, seed_stream(config.seed, i)));
    PushoutReport report;
    report.v = config.v;
    report.horizon = config.horizon;
    report.radius = geometry.critical_radius;
    report.r2 = geometry.r2;
    report.m_r2 = geometry.m_r2;
    report.kappa_bound = kappa_bound(config.v, geometry.m_r2, geometry.critical_radius, geometry.r2);
    double total = 0.0;
    for (const Vec& x0 : initials) {
      const CocycleRun run = integrate_forward(drift, sigma, driver, x0, config.horizon);
      const double occ = occupation_time_in_ball(run, geometry.critical_radius);
      report.per_initial.push_back(occ);
      total += occ;
      report.worst_case_over_initials = std::max(report.worst_case_over_initials, occ);
    }
    report.occupation_time = total / static_cast<double>(initials.size());
    out.reports.push_back(std::move(report));
  }
  out.acceptance_rate = static_cast<double>(out.accepted) / static_cast<double>(out.attempts);
  return out;
}

}  // namespace fracsync
