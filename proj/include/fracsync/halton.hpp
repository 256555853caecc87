#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fracsync/linalg.hpp"

namespace fracsync {

/// Radical inverse of `index` in `base`.
inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double scale = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= static_cast<double>(base);
  }
  return result;
}

/// First `n` Halton points of the cube [-1, 1]^d that fall in the unit ball,
/// scaled to `radius`. Deterministic and low-discrepancy.
inline std::vector<Vec> halton_ball(std::size_t n, int dim, double radius) {
  static constexpr std::array<std::uint64_t, kMaxDim> kPrimes{2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<Vec> points;
  points.reserve(n);
  for (std::uint64_t index = 1; points.size() < n; ++index) {
    Vec x(dim);
    for (int c = 0; c < dim; ++c) x[c] = 2.0 * radical_inverse(index, kPrimes[static_cast<std::size_t>(c)]) - 1.0;
    if (x.squaredNorm() <= 1.0) points.push_back(radius * x);
  }
  return points;
}

}  // namespace fracsync
