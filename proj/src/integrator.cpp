#include "fracsync/integrator.hpp"

#include <cmath>
#include <string>

#include "fracsync/errors.hpp"

namespace fracsync {

Vec CocycleRun::state(std::size_t k) const {
  const auto d = static_cast<std::size_t>(dim);
  return to_vec(std::span<const double>(states.data() + k * d, d));
}

Vec noise_increment(const DiffusionMatrix& sigma, const NoisePath& driver, std::int64_t step) {
  const auto a = driver.at_step(step);
  const auto b = driver.at_step(step + 1);
  Vec db(driver.dim());
  for (int c = 0; c < driver.dim(); ++c) db[c] = b[static_cast<std::size_t>(c)] - a[static_cast<std::size_t>(c)];
  return sigma.sigma * db;
}

void check_finite_state(const Vec& x, double t, double last_good_time) {
  if (!x.allFinite() || x.norm() > kBlowUpNorm) {
    throw IntegrationError("integration blew up at t = " + std::to_string(t), last_good_time);
  }
}

namespace {

void require_compatible(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver,
                        const Vec& x0) {
  require(drift.dim() == sigma.dim(), "integrator: drift and sigma dimensions differ");
  require(driver.dim() == drift.dim(), "integrator: driver dimension differs from the drift");
  require(x0.size() == drift.dim(), "integrator: initial state has the wrong dimension");
  require(x0.allFinite(), "integrator: initial state is not finite");
}

}  // namespace

CocycleRun integrate_range(const DriftModel& drift, const DiffusionMatrix& sigma,
                           std::shared_ptr<const NoisePath> driver, const Vec& x0, std::int64_t first_step,
                           std::int64_t last_step, const IntegratorOptions& options) {
  require(driver != nullptr, "integrator: missing driver");
  require_compatible(drift, sigma, *driver, x0);
  const Grid& grid = driver->grid();
  require(first_step <= last_step, "integrator: empty step range");
  require(grid.contains_step(first_step) && grid.contains_step(last_step),
          "integrator: driver does not cover the requested interval");
  require(options.record_stride >= 1, "integrator: record_stride must be >= 1");

  const double dt = grid.dt();
  const int d = drift.dim();
  const HeunScheme scheme(drift, dt);

  CocycleRun run;
  run.driver = driver;
  run.first_step = first_step;
  run.last_step = last_step;
  run.x0 = x0;
  run.dim = d;
  const auto steps = static_cast<std::size_t>(last_step - first_step);
  const std::size_t recorded = steps / options.record_stride + 2;
  run.times.reserve(recorded);
  run.states.reserve(recorded * static_cast<std::size_t>(d));

  Vec x = x0;
  Mat m = Mat::Identity(d, d);
  auto record = [&](std::int64_t i) {
    run.times.push_back(static_cast<double>(i) * dt);
    run.states.insert(run.states.end(), x.data(), x.data() + d);
    if (options.with_jacobian) run.jacobians.push_back(m);
  };
  record(first_step);

  double last_good = static_cast<double>(first_step) * dt;
  for (std::int64_t i = first_step; i < last_step; ++i) {
    const Vec g = noise_increment(sigma, *driver, i);
    const double drift_step = options.with_jacobian ? scheme.step(x, m, g) : scheme.step(x, g);
    if (drift_step > options.step_bound) run.step_warning = true;
    const double t = static_cast<double>(i + 1) * dt;
    check_finite_state(x, t, last_good);
    last_good = t;
    const auto done = static_cast<std::size_t>(i + 1 - first_step);
    if (done % options.record_stride == 0 || i + 1 == last_step) record(i + 1);
  }
  return run;
}

CocycleRun integrate_forward(const DriftModel& drift, const DiffusionMatrix& sigma,
                             std::shared_ptr<const NoisePath> driver, const Vec& x0, double horizon,
                             const IntegratorOptions& options) {
  require(driver != nullptr, "integrator: missing driver");
  require(horizon >= 0.0, "integrator: horizon must be nonnegative");
  const std::int64_t steps = grid_steps(horizon, driver->grid().dt());
  return integrate_range(drift, sigma, std::move(driver), x0, 0, steps, options);
}

Vec pullback_solve(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver, const Vec& x0,
                   double t_back) {
  return pullback_solve_many(drift, sigma, driver, {x0}, t_back).front();
}

std::vector<Vec> pullback_solve_many(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver,
                                     const std::vector<Vec>& initials, double t_back) {
  require(t_back >= 0.0, "pullback: t_back must be nonnegative");
  const double dt = driver.grid().dt();
  const std::int64_t n = grid_steps(t_back, dt);
  require(driver.grid().contains_step(-n), "pullback: driver does not cover [-t_back, 0]");
  for (const Vec& x0 : initials) require_compatible(drift, sigma, driver, x0);

  const HeunScheme scheme(drift, dt);
  std::vector<Vec> states = initials;
  double last_good = -static_cast<double>(n) * dt;
  for (std::int64_t i = -n; i < 0; ++i) {
    const Vec g = noise_increment(sigma, driver, i);
    const double t = static_cast<double>(i + 1) * dt;
    for (Vec& x : states) {
      scheme.step(x, g);
      check_finite_state(x, t, last_good);
    }
    last_good = t;
  }
  return states;
}

}  // namespace fracsync
