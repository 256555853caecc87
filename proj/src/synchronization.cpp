#include "fracsync/synchronization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracsync/errors.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/halton.hpp"
#include "fracsync/integrator.hpp"
#include "fracsync/parallel.hpp"
#include "fracsync/rng.hpp"

namespace fracsync {
namespace {

void fit_decay(SyncReport& report) {
  const double horizon = report.times.empty() ? 0.0 : report.times.back();
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    if (report.r_series[k] < kSyncFloor) break;
    if (report.times[k] < 2.0 * horizon / 3.0) continue;
    ts.push_back(report.times[k]);
    ys.push_back(std::log(report.r_series[k]));
  }
  if (ts.size() < 3) return;
  const double n = static_cast<double>(ts.size());
  const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (stt == 0.0) return;
  const double slope = sty / stt;
  report.decay_rate = -slope;
  report.fit_r2 = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  report.has_fit = true;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

double max_pairwise_distance(const std::vector<Vec>& points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, (points[i] - points[j]).norm());
  }
  return best;
}

SyncReport n_point_motion(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver,
                          const std::vector<Vec>& initials, double horizon, std::size_t record_stride) {
  require(initials.size() >= 2, "n_point_motion: need at least two initial states");
  require(record_stride >= 1, "n_point_motion: record_stride must be >= 1");
  require(drift.dim() == sigma.dim() && driver.dim() == drift.dim(), "n_point_motion: dimension mismatch");
  const double dt = driver.grid().dt();
  const std::int64_t steps = grid_steps(horizon, dt);
  require(driver.grid().contains_step(0) && driver.grid().contains_step(steps),
          "n_point_motion: driver does not cover [0, horizon]");

  SyncReport report;
  report.n_points = static_cast<int>(initials.size());
  report.c_bound = drift.c_bound();
  std::vector<Vec> states = initials;
  report.times.push_back(0.0);
  report.r_series.push_back(max_pairwise_distance(states));
  report.initial_r = report.r_series.front();

  const HeunScheme scheme(drift, dt);
  double last_good = 0.0;
  try {
    for (std::int64_t i = 0; i < steps; ++i) {
      const Vec g = noise_increment(sigma, driver, i);
      const double t = static_cast<double>(i + 1) * dt;
      for (Vec& x : states) {
        scheme.step(x, g);
        check_finite_state(x, t, last_good);
      }
      last_good = t;
      if ((i + 1) % static_cast<std::int64_t>(record_stride) == 0 || i + 1 == steps) {
        report.times.push_back(t);
        report.r_series.push_back(max_pairwise_distance(states));
      }
    }
  } catch (const IntegrationError& e) {
    report.aborted = true;
    report.abort_time = e.last_finite_time();
  }
  report.final_r = report.r_series.back();
  fit_decay(report);
  return report;
}

AtomEstimate cluster_points(const std::vector<Vec>& points, double radius) {
  require(!points.empty(), "cluster_points: no points");
  require(radius > 0.0, "cluster_points: radius must be positive");
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((points[i] - points[j]).norm() <= radius) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }
  // Clusters are numbered by their first member, so the order is deterministic.
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> root_label(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find_root(parent, i);
    if (root_label[r] == n) {
      root_label[r] = members.size();
      members.emplace_back();
    }
    members[root_label[r]].push_back(i);
  }

  AtomEstimate out;
  out.cluster_radius = radius;
  out.endpoints = points;
  for (const auto& m : members) {
    Vec center = Vec::Zero(points.front().size());
    for (std::size_t i : m) center += points[i];
    center /= static_cast<double>(m.size());
    out.centers.push_back(center);
    out.weights.push_back(static_cast<double>(m.size()) / static_cast<double>(n));
  }
  out.p_hat = static_cast<int>(out.centers.size());
  out.max_center_distance = max_pairwise_distance(out.centers);
  for (std::size_t i = 0; i < out.centers.size(); ++i) {
    for (std::size_t j = i + 1; j < out.centers.size(); ++j) {
      if ((out.centers[i] - out.centers[j]).norm() < 2.0 * radius) out.ambiguous = true;
    }
  }
  return out;
}

AtomEstimate estimate_atoms(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver,
                            const std::vector<Vec>& initials, double t_back, double cluster_radius) {
  require(!initials.empty(), "estimate_atoms: no initial states");
  return cluster_points(pullback_solve_many(drift, sigma, driver, initials, t_back), cluster_radius);
}

std::vector<AttractorEstimate> attractor_diameter(const DriftModel& drift, const DiffusionMatrix& sigma,
                                                  const NoisePath& driver, double ball_radius, int n_initials,
                                                  const std::vector<double>& t_back_schedule) {
  require(ball_radius > 0.0, "attractor_diameter: ball_radius must be positive");
  require(n_initials >= 2, "attractor_diameter: need at least two initial points");
  const std::vector<Vec> initials = halton_ball(static_cast<std::size_t>(n_initials), drift.dim(), ball_radius);
  std::vector<AttractorEstimate> out;
  for (double t_back : t_back_schedule) {
    AttractorEstimate est;
    est.t_back = t_back;
    est.n_initials = n_initials;
    est.sample_points = pullback_solve_many(drift, sigma, driver, initials, t_back);
    est.diameter = max_pairwise_distance(est.sample_points);
    out.push_back(std::move(est));
  }
  return out;
}

ErgodicReport ergodic_average_check(const DriftModel& drift, const DiffusionMatrix& sigma, double h,
                                    const std::function<double(const Vec&)>& test_fn, const Vec& x0,
                                    const ErgodicConfig& config) {
  require(config.n_realizations >= 2, "ergodic: need at least two realizations");
  require(config.horizon > 0.0, "ergodic: horizon must be positive");
  const std::int64_t steps = grid_steps(config.horizon, config.dt);
  const auto n = static_cast<std::size_t>(config.n_realizations);
  std::vector<double> time_avgs(n), endpoint_vals(n);
  parallel_for(n, resolve_thread_count(config.threads), [&](std::size_t r) {
    const NoisePath driver =
        sample_two_sided_fbm(config.dt, -config.horizon, config.horizon, h, drift.dim(), seed_stream(config.seed, r));
    const HeunScheme scheme(drift, config.dt);
    Vec x = x0;
    double acc = test_fn(x);
    double last_good = 0.0;
    for (std::int64_t i = 0; i < steps; ++i) {
      scheme.step(x, noise_increment(sigma, driver, i));
      const double t = static_cast<double>(i + 1) * config.dt;
      check_finite_state(x, t, last_good);
      last_good = t;
      if (i + 1 < steps) acc += test_fn(x);
    }
    time_avgs[r] = acc / static_cast<double>(steps);
    endpoint_vals[r] = test_fn(pullback_solve(drift, sigma, driver, x0, config.horizon));
  });

  auto mean_se = [](const std::vector<double>& xs) {
    const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    return std::pair{m, std::sqrt(v / static_cast<double>(xs.size()))};
  };
  ErgodicReport out;
  std::tie(out.time_avg, out.time_se) = mean_se(time_avgs);
  std::tie(out.ensemble_avg, out.ensemble_se) = mean_se(endpoint_vals);
  out.gap = std::abs(out.time_avg - out.ensemble_avg);
  return out;
}

}  // namespace fracsync
