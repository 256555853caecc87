#include "fracsync/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracsync/errors.hpp"

namespace fracsync {

std::int64_t grid_steps(double t, double dt) {
  require(std::isfinite(t) && std::isfinite(dt) && dt > 0.0, "grid: dt must be finite and positive");
  const double ratio = t / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    throw ContractViolation("grid: time " + std::to_string(t) + " is not a multiple of dt=" +
                            std::to_string(dt));
  }
  return static_cast<std::int64_t>(rounded);
}

Grid::Grid(double dt, std::int64_t first, std::int64_t last) : dt_(dt), first_(first), last_(last) {
  require(std::isfinite(dt) && dt > 0.0, "grid: dt must be finite and positive");
  require(first <= 0 && last >= 0, "grid: t = 0 must be a node (first <= 0 <= last)");
}

Grid Grid::past(double dt, std::int64_t steps) {
  require(steps >= 0, "grid: negative step count");
  return Grid(dt, -steps, 0);
}

Grid Grid::future(double dt, std::int64_t steps) {
  require(steps >= 0, "grid: negative step count");
  return Grid(dt, 0, steps);
}

Grid Grid::span(double dt, double t_min, double t_max) {
  require(t_min <= 0.0 && t_max >= 0.0, "grid: span must contain 0");
  return Grid(dt, grid_steps(t_min, dt), grid_steps(t_max, dt));
}

std::size_t Grid::index_of_step(std::int64_t i) const {
  if (!contains_step(i)) {
    throw ContractViolation("grid: step " + std::to_string(i) + " outside [" + std::to_string(first_) +
                            ", " + std::to_string(last_) + "]");
  }
  return static_cast<std::size_t>(i - first_);
}

std::int64_t Grid::steps_for(double t) const { return grid_steps(t, dt_); }

}  // namespace fracsync
