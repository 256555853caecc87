#include "fracsync/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "fracsync/errors.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/integrator.hpp"
#include "fracsync/parallel.hpp"
#include "fracsync/rng.hpp"

namespace fracsync {
namespace {

constexpr std::uint64_t kNoiseTag = 0;
constexpr std::uint64_t kStartTag = 1;
constexpr double kMaxDropFraction = 0.2;
constexpr double kCollapse = 1e-14;

double z_quantile(double level) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
}

void validate(const LyapunovConfig& config, const DriftModel& drift, const DiffusionMatrix& sigma, double h) {
  require(h > 0.0 && h < 1.0, "lyapunov: hurst index must lie in (0, 1)");
  require(config.dt > 0.0, "lyapunov: dt must be positive");
  require(config.n_realizations >= 2, "lyapunov: need at least two realizations");
  require(drift.dim() == sigma.dim(), "lyapunov: drift and sigma dimensions differ");
  const double burn = effective_burn_in(config, drift);
  require(burn >= 0.0 && burn < config.horizon, "lyapunov: burn_in must be smaller than the horizon");
  grid_steps(config.horizon, config.dt);
  grid_steps(burn, config.dt);
  require(grid_steps(config.renorm_interval, config.dt) >= 1, "lyapunov: renorm_interval must be a positive multiple of dt");
}

Vec uniform_in_ball(NormalSource& normal, int dim, double radius) {
  Vec v(dim);
  for (int c = 0; c < dim; ++c) v[c] = normal();
  const double r = radius * std::pow(normal.uniform(), 1.0 / dim);
  return v * (r / v.norm());
}

Vec unit_vector(NormalSource& normal, int dim) {
  Vec v(dim);
  for (int c = 0; c < dim; ++c) v[c] = normal();
  return v / v.norm();
}

double start_radius(const LyapunovConfig& config, const DriftModel& drift) {
  if (config.x0_radius > 0.0) return config.x0_radius;
  constexpr double kCap = 100.0;
  return std::min(kCap, std::sqrt(absorbing_constant(drift) / drift.constants().c2f));
}

// Shared driver loop: `advance(i, g)` moves the realization one step and
// `renormalize(measuring)` runs at every renormalization node.
struct RealizationPlan {
  std::int64_t steps;
  std::int64_t burn_steps;
  std::int64_t renorm_steps;
};

template <class Step, class Renorm>
void drive(const RealizationPlan& plan, const DiffusionMatrix& sigma, const NoisePath* noise, double dt, Step step,
           Renorm renormalize) {
  const Vec zero = Vec::Zero(sigma.dim());
  double last_good = 0.0;
  for (std::int64_t i = 0; i < plan.steps; ++i) {
    const Vec g = noise ? noise_increment(sigma, *noise, i) : zero;
    step(g, static_cast<double>(i + 1) * dt, last_good);
    last_good = static_cast<double>(i + 1) * dt;
    const std::int64_t done = i + 1;
    const bool measuring = done > plan.burn_steps;
    const bool boundary = (done % plan.renorm_steps == 0) || done == plan.burn_steps || done == plan.steps;
    if (boundary) renormalize(measuring);
  }
}

LyapunovEstimate summarize(std::vector<std::optional<double>>& slots, const LyapunovConfig& config, double burn) {
  LyapunovEstimate out;
  out.burn_in = burn;
  out.horizon = config.horizon;
  out.renorm_interval = config.renorm_interval;
  for (const auto& s : slots) {
    if (s) out.per_realization.push_back(*s);
    else ++out.n_dropped;
  }
  out.n_realizations = static_cast<int>(out.per_realization.size());
  const double dropped = static_cast<double>(out.n_dropped) / static_cast<double>(slots.size());
  if (dropped > kMaxDropFraction || out.n_realizations < 2) {
    throw EstimationError("lyapunov: " + std::to_string(out.n_dropped) + " of " + std::to_string(slots.size()) +
                          " realizations blew up");
  }
  double mean = 0.0;
  for (double v : out.per_realization) mean += v;
  mean /= out.n_realizations;
  double var = 0.0;
  for (double v : out.per_realization) var += (v - mean) * (v - mean);
  var /= (out.n_realizations - 1);
  out.lambda1 = mean;
  out.std_err = std::sqrt(var / out.n_realizations);
  return out;
}

RealizationPlan make_plan(const LyapunovConfig& config, double burn) {
  return {grid_steps(config.horizon, config.dt), grid_steps(burn, config.dt),
          grid_steps(config.renorm_interval, config.dt)};
}

std::optional<NoisePath> realization_noise(const LyapunovConfig& config, const RealizationPlan& plan, double h,
                                           int dim, std::size_t r) {
  if (config.deterministic) return std::nullopt;
  return sample_fbm(Grid::future(config.dt, plan.steps), h, dim, seed_stream(config.seed, r, kNoiseTag));
}

}  // namespace

double LyapunovEstimate::ci_low(double level) const { return lambda1 - z_quantile(level) * std_err; }
double LyapunovEstimate::ci_high(double level) const { return lambda1 + z_quantile(level) * std_err; }

double effective_burn_in(const LyapunovConfig& config, const DriftModel& drift) {
  if (config.burn_in >= 0.0) return config.burn_in;
  return std::max(20.0, 5.0 / drift.constants().c2f);
}

LyapunovEstimate estimate_lambda1(const DriftModel& drift, const DiffusionMatrix& sigma, double h,
                                  const LyapunovConfig& config) {
  validate(config, drift, sigma, h);
  const double burn = effective_burn_in(config, drift);
  const RealizationPlan plan = make_plan(config, burn);
  const double measured_time = config.horizon - burn;
  const int d = drift.dim();
  const double radius = start_radius(config, drift);

  std::vector<std::optional<double>> slots(static_cast<std::size_t>(config.n_realizations));
  parallel_for(slots.size(), resolve_thread_count(config.threads), [&](std::size_t r) {
    const auto noise = realization_noise(config, plan, h, d, r);
    NormalSource start(seed_stream(config.seed, r, kStartTag));
    Vec x = uniform_in_ball(start, d, radius);
    Vec v = unit_vector(start, d);
    const HeunScheme scheme(drift, config.dt);
    double log_sum = 0.0;
    try {
      drive(
          plan, sigma, noise ? &*noise : nullptr, config.dt,
          [&](const Vec& g, double t, double last_good) {
            scheme.step(x, v, g);
            check_finite_state(x, t, last_good);
          },
          [&](bool measuring) {
            const double n = v.norm();
            if (!(n > 0.0) || !std::isfinite(n)) throw IntegrationError("lyapunov: tangent degenerated", 0.0);
            if (measuring) log_sum += std::log(n);
            v /= n;
          });
      slots[r] = log_sum / measured_time;
    } catch (const IntegrationError&) {
      slots[r] = std::nullopt;
    }
  });
  return summarize(slots, config, burn);
}

SweepResult lambda1_sigma_sweep(const DriftModel& drift, double h, const std::vector<double>& kappas,
                                const LyapunovConfig& config) {
  require(std::is_sorted(kappas.begin(), kappas.end()), "sweep: kappas must be sorted ascending");
  SweepResult out;
  for (double kappa : kappas) {
    out.points.push_back({kappa, estimate_lambda1(drift, DiffusionMatrix::scaled_identity(kappa, drift.dim()), h,
                                                  config)});
    if (!out.flagged && out.points.back().estimate.ci_high() < 0.0) out.flagged = out.points.size() - 1;
  }
  return out;
}

LyapunovEstimate fd_lyapunov_crosscheck(const DriftModel& drift, const DiffusionMatrix& sigma, double h,
                                        const LyapunovConfig& config, double epsilon) {
  require(epsilon >= 1e-7 && epsilon <= 1e-2, "fd crosscheck: epsilon must lie in [1e-7, 1e-2]");
  validate(config, drift, sigma, h);
  const double burn = effective_burn_in(config, drift);
  const RealizationPlan plan = make_plan(config, burn);
  const double measured_time = config.horizon - burn;
  const int d = drift.dim();
  const double radius = start_radius(config, drift);

  std::vector<std::optional<double>> slots(static_cast<std::size_t>(config.n_realizations));
  parallel_for(slots.size(), resolve_thread_count(config.threads), [&](std::size_t r) {
    const auto noise = realization_noise(config, plan, h, d, r);
    NormalSource start(seed_stream(config.seed, r, kStartTag));
    Vec x = uniform_in_ball(start, d, radius);
    Vec y = x + epsilon * unit_vector(start, d);
    const HeunScheme scheme(drift, config.dt);
    double log_sum = 0.0;
    try {
      drive(
          plan, sigma, noise ? &*noise : nullptr, config.dt,
          [&](const Vec& g, double t, double last_good) {
            scheme.step(x, g);
            scheme.step(y, g);
            check_finite_state(x, t, last_good);
            check_finite_state(y, t, last_good);
          },
          [&](bool measuring) {
            const double sep = (y - x).norm();
            if (sep < kCollapse) {
              throw EstimationError("fd crosscheck: separation collapsed below 1e-14; rescale failed");
            }
            if (measuring) log_sum += std::log(sep / epsilon);
            y = x + (y - x) * (epsilon / sep);
          });
      slots[r] = log_sum / measured_time;
    } catch (const IntegrationError&) {
      slots[r] = std::nullopt;
    }
  });
  return summarize(slots, config, burn);
}

}  // namespace fracsync
