#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fracsync/fbm.hpp"
#include "fracsync/linalg.hpp"
#include "fracsync/rng.hpp"

namespace fracsync::testing {

inline double max_abs_diff(const NoisePath& a, const NoisePath& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

inline double max_abs(const NoisePath& a) {
  double worst = 0.0;
  for (double v : a.values()) worst = std::max(worst, std::abs(v));
  return worst;
}

inline Vec random_vec(NormalSource& normal, int dim, double scale = 1.0) {
  Vec v(dim);
  for (int c = 0; c < dim; ++c) v[c] = scale * normal();
  return v;
}

/// Sample mean and standard error of `xs`.
struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

}  // namespace fracsync::testing
