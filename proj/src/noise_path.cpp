#include "fracsync/noise_path.hpp"

#include <cmath>
#include <numbers>

#include "fracsync/errors.hpp"

namespace fracsync {

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::wiener ? "wiener" : "fractional";
}

HurstParams HurstParams::standard(double h) {
  require(h > 0.0 && h < 1.0, "hurst index must lie in (0, 1)");
  const double g = std::tgamma(h + 0.5);
  const double alpha2 = g * g / (std::tgamma(2.0 * h + 1.0) * std::sin(std::numbers::pi * h));
  return {h, std::sqrt(alpha2)};
}

NoisePath::NoisePath(Grid grid, int dim, NoiseKind kind, double hurst, std::vector<double> values)
    : grid_(grid), dim_(dim), kind_(kind), hurst_(hurst), values_(std::move(values)) {
  require(dim >= 1, "noise path: dimension must be >= 1");
  require(hurst > 0.0 && hurst < 1.0, "noise path: hurst index must lie in (0, 1)");
  require(kind != NoiseKind::wiener || hurst == 0.5, "noise path: Wiener paths carry H = 1/2");
  require(values_.size() == grid_.size() * static_cast<std::size_t>(dim),
          "noise path: value count does not match grid size * dim");
  for (double v : values_) require(std::isfinite(v), "noise path: non-finite value");
}

NoisePath NoisePath::zeros(Grid grid, int dim, NoiseKind kind, double hurst) {
  std::vector<double> values(grid.size() * static_cast<std::size_t>(dim), 0.0);
  return NoisePath(grid, dim, kind, hurst, std::move(values));
}

bool NoisePath::anchored() const noexcept {
  for (double v : at(grid_.zero_index())) {
    if (v != 0.0) return false;
  }
  return true;
}

NoisePath NoisePath::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= factor;
  return NoisePath(grid_, dim_, kind_, hurst_, std::move(out));
}

}  // namespace fracsync
