#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracsync/grid.hpp"

namespace fracsync {

enum class NoiseKind { wiener, fractional };

std::string to_string(NoiseKind kind);

/// Hurst index together with the normalization of the moving-average kernel.
struct HurstParams {
  double h;
  double alpha;

  /// Normalization that gives the transformed path variance |t|^{2H}:
  /// alpha^2 = Gamma(H + 1/2)^2 / (Gamma(2H + 1) sin(pi H)).
  static HurstParams standard(double h);
};

/// Discretely sampled d-dimensional path on a Grid. Immutable once built.
///
/// Values are stored node-major: `values[k * dim + c]`.
class NoisePath {
 public:
  NoisePath(Grid grid, int dim, NoiseKind kind, double hurst, std::vector<double> values);

  static NoisePath zeros(Grid grid, int dim, NoiseKind kind, double hurst);

  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  NoiseKind kind() const noexcept { return kind_; }
  /// 0.5 for Wiener paths.
  double hurst() const noexcept { return hurst_; }
  std::size_t size() const noexcept { return grid_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const double> at(std::size_t k) const noexcept {
    return {values_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double at(std::size_t k, int c) const noexcept {
    return values_[k * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(c)];
  }
  /// Value at grid step `i` (time `i * dt`).
  std::span<const double> at_step(std::int64_t i) const { return at(grid_.index_of_step(i)); }

  /// Value at t = 0 is exactly the zero vector.
  bool anchored() const noexcept;
  bool is_past() const noexcept { return grid_.last() == 0; }

  NoisePath scaled(double factor) const;

 private:
  Grid grid_;
  int dim_;
  NoiseKind kind_;
  double hurst_;
  std::vector<double> values_;
};

}  // namespace fracsync
