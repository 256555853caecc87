#include "fracsync/fou.hpp"

#include <cmath>

#include "fracsync/errors.hpp"
#include "fracsync/integrator.hpp"

namespace fracsync {

Vec FouProcess::at(std::size_t k) const {
  const auto d = static_cast<std::size_t>(dim);
  return to_vec(std::span<const double>(values.data() + k * d, d));
}

FouProcess fou_evaluate(const DiffusionMatrix& sigma, const NoisePath& driver, double t_back) {
  require(t_back >= 0.0, "fou: t_back must be nonnegative");
  require(driver.dim() == sigma.dim(), "fou: driver and sigma dimensions differ");
  const double dt = driver.grid().dt();
  const std::int64_t n = grid_steps(t_back, dt);
  require(driver.grid().contains_step(-n), "fou: driver does not cover [-t_back, 0]");

  FouProcess out{Grid::past(dt, n), driver.dim(), {}, driver.hurst(), sigma,
                 std::exp(-t_back) * std::sqrt(1.0 + t_back)};
  const auto d = static_cast<std::size_t>(driver.dim());
  out.values.assign(static_cast<std::size_t>(n + 1) * d, 0.0);
  const double decay = std::exp(-dt);
  const double gain = -std::expm1(-dt) / dt;
  Vec z = Vec::Zero(driver.dim());
  for (std::int64_t i = -n; i < 0; ++i) {
    z = decay * z + gain * noise_increment(sigma, driver, i);
    const auto k = static_cast<std::size_t>(i + n + 1);
    for (std::size_t c = 0; c < d; ++c) out.values[k * d + c] = z[static_cast<Eigen::Index>(c)];
  }
  return out;
}

double absorbing_constant(const DriftModel& drift) {
  const DriftConstants& c = drift.constants();
  return 2.0 * c.c1f + (2.0 / c.c2f) * (1.0 + c.c_growth * c.c_growth);
}

double absorbing_radius(const DriftModel& drift, const FouProcess& fou) {
  require(fou.dim == drift.dim(), "absorbing radius: dimension mismatch");
  const double c2 = drift.constants().c2f;
  const double power = 2.0 * drift.constants().n_growth;
  const std::size_t n = fou.grid.size();
  auto weight = [&](std::size_t k) { return std::pow(1.0 + fou.at(k).norm(), power); };

  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = fou.grid.time(k);
    const double b = fou.grid.time(k + 1);
    const double cell = (std::exp(c2 * b) - std::exp(c2 * a)) / c2;
    integral += 0.5 * (weight(k) + weight(k + 1)) * cell;
  }
  integral += weight(0) * std::exp(c2 * fou.grid.t_min()) / c2;
  return fou.at(n - 1).norm() + std::sqrt(absorbing_constant(drift) * integral);
}

}  // namespace fracsync
