#include "fracsync/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "fracsync/errors.hpp"
#include "fracsync/rng.hpp"

namespace fracsync {
namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Cumulative sums of node-major increments, re-anchored at the zero node.
std::vector<double> integrate_increments(const Grid& grid, int dim, const std::vector<double>& increments) {
  const std::size_t n = grid.size();
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> values(n * d, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t c = 0; c < d; ++c) values[k * d + c] = values[(k - 1) * d + c] + increments[(k - 1) * d + c];
  }
  const std::size_t z = grid.zero_index();
  std::vector<double> origin(values.begin() + static_cast<std::ptrdiff_t>(z * d),
                             values.begin() + static_cast<std::ptrdiff_t>((z + 1) * d));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < d; ++c) values[k * d + c] -= origin[c];
  }
  return values;
}

// Circulant eigenvalues of the fGn covariance embedded in size 2M, or empty
// when the embedding is not nonnegative definite within tolerance.
std::vector<double> circulant_eigenvalues(double h, std::size_t m_half, double tolerance) {
  const std::size_t m = 2 * m_half;
  const std::vector<double> gamma = fgn_autocovariance(h, m_half + 1);
  std::vector<std::complex<double>> row(m);
  for (std::size_t k = 0; k <= m_half; ++k) row[k] = gamma[k];
  for (std::size_t k = 1; k < m_half; ++k) row[m - k] = gamma[k];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, row);
  std::vector<double> eig(m);
  double largest = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    eig[k] = spectrum[k].real();
    largest = std::max(largest, eig[k]);
  }
  for (double& e : eig) {
    if (e < -tolerance * largest) return {};
    e = std::max(e, 0.0);
  }
  return eig;
}

std::vector<double> fgn_circulant(std::size_t n_inc, int dim, const std::vector<double>& eig,
                                  NormalSource& normal) {
  const std::size_t m = eig.size();
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> out(n_inc * d);
  std::vector<std::complex<double>> weights(m), sample;
  std::vector<double> scale(m);
  for (std::size_t k = 0; k < m; ++k) scale[k] = std::sqrt(eig[k] / static_cast<double>(m));
  Eigen::FFT<double> fft;
  // One complex transform yields two independent coordinates (real, imag).
  for (std::size_t c = 0; c < d; c += 2) {
    for (std::size_t k = 0; k < m; ++k) {
      const double re = normal();
      const double im = normal();
      weights[k] = {scale[k] * re, scale[k] * im};
    }
    fft.fwd(sample, weights);
    for (std::size_t j = 0; j < n_inc; ++j) {
      out[j * d + c] = sample[j].real();
      if (c + 1 < d) out[j * d + c + 1] = sample[j].imag();
    }
  }
  return out;
}

std::vector<double> fgn_cholesky(std::size_t n_inc, int dim, double h, NormalSource& normal) {
  const std::vector<double> gamma = fgn_autocovariance(h, n_inc);
  Eigen::MatrixXd cov(n_inc, n_inc);
  for (std::size_t i = 0; i < n_inc; ++i) {
    for (std::size_t j = 0; j < n_inc; ++j) cov(i, j) = gamma[i > j ? i - j : j - i];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw GenerationError("sample_fbm: circulant embedding rejected and Cholesky factorisation failed "
                          "(covariance not positive definite)");
  }
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> out(n_inc * d);
  Eigen::VectorXd z(n_inc);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t j = 0; j < n_inc; ++j) z[j] = normal();
    const Eigen::VectorXd x = llt.matrixL() * z;
    for (std::size_t j = 0; j < n_inc; ++j) out[j * d + c] = x[j];
  }
  return out;
}

// Moving-average (Mandelbrot-van Ness) transform of a piecewise-linear
// path: S_k = sum_j slope_j * w_{k-j}, with w_m the exact cell integral of
// (t_k - u)^{H-1/2}. Returns (S_k - S_zero) / alpha, node-major.
std::vector<double> moving_average_transform(const NoisePath& path, const HurstParams& params) {
  const Grid& grid = path.grid();
  const std::size_t n = grid.size();
  const auto d = static_cast<std::size_t>(path.dim());
  std::vector<double> out(n * d, 0.0);
  if (n < 2) return out;

  const double dt = grid.dt();
  const double p = params.h + 0.5;
  const double cell_scale = std::pow(dt, p) / p;
  const std::size_t len = next_pow2(2 * n);

  std::vector<std::complex<double>> kernel(len, 0.0), kernel_hat;
  for (std::size_t m = 1; m < n; ++m) {
    kernel[m] = cell_scale * (std::pow(static_cast<double>(m), p) - std::pow(static_cast<double>(m - 1), p));
  }
  Eigen::FFT<double> fft;
  fft.fwd(kernel_hat, kernel);

  std::vector<std::complex<double>> slopes(len), slopes_hat, conv;
  const std::size_t z = grid.zero_index();
  for (std::size_t c = 0; c < d; ++c) {
    std::fill(slopes.begin(), slopes.end(), 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) slopes[j] = (path.at(j + 1, static_cast<int>(c)) - path.at(j, static_cast<int>(c))) / dt;
    fft.fwd(slopes_hat, slopes);
    for (std::size_t k = 0; k < len; ++k) slopes_hat[k] *= kernel_hat[k];
    fft.inv(conv, slopes_hat);
    const double at_zero = conv[z].real();
    for (std::size_t k = 0; k < n; ++k) out[k * d + c] = (conv[k].real() - at_zero) / params.alpha;
  }
  return out;
}

void require_anchored(const NoisePath& path, const char* op) {
  if (!path.anchored()) throw ContractViolation(std::string(op) + ": path is not anchored at t = 0");
}

void require_past(const NoisePath& path, const char* op) {
  if (!path.is_past()) throw ContractViolation(std::string(op) + ": expected a past path on [t_min, 0]");
}

}  // namespace

std::vector<double> fgn_autocovariance(double h, std::size_t n) {
  require(h > 0.0 && h < 1.0, "fgn_autocovariance: hurst index must lie in (0, 1)");
  std::vector<double> gamma(n);
  const double e = 2.0 * h;
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    gamma[k] = 0.5 * (std::pow(kk + 1.0, e) + std::pow(std::abs(kk - 1.0), e) - 2.0 * std::pow(kk, e));
  }
  return gamma;
}

NoisePath sample_wiener(const Grid& grid, int dim, std::uint64_t seed) {
  require(dim >= 1, "sample_wiener: dimension must be >= 1");
  NormalSource normal(seed);
  const std::size_t n_inc = grid.size() - 1;
  const double sd = std::sqrt(grid.dt());
  std::vector<double> inc(n_inc * static_cast<std::size_t>(dim));
  for (double& v : inc) v = sd * normal();
  return NoisePath(grid, dim, NoiseKind::wiener, 0.5, integrate_increments(grid, dim, inc));
}

NoisePath sample_fbm(const Grid& grid, double h, int dim, std::uint64_t seed, const FbmSamplerOptions& options,
                     FbmMethod* method_used) {
  require(h > 0.0 && h < 1.0, "sample_fbm: hurst index must lie in (0, 1)");
  require(dim >= 1, "sample_fbm: dimension must be >= 1");
  const std::size_t n_inc = grid.size() - 1;
  if (n_inc == 0) {
    if (method_used) *method_used = FbmMethod::iid;
    return NoisePath::zeros(grid, dim, NoiseKind::fractional, h);
  }
  NormalSource normal(seed);
  std::vector<double> inc;
  FbmMethod method = FbmMethod::circulant;
  if (h == 0.5 && !options.force_cholesky) {
    method = FbmMethod::iid;
    inc.resize(n_inc * static_cast<std::size_t>(dim));
    for (double& v : inc) v = normal();
  } else {
    std::vector<double> eig;
    if (!options.force_cholesky) eig = circulant_eigenvalues(h, next_pow2(n_inc), options.embedding_tolerance);
    if (!eig.empty()) {
      inc = fgn_circulant(n_inc, dim, eig, normal);
    } else {
      method = FbmMethod::cholesky;
      if (n_inc > options.cholesky_max) {
        throw GenerationError("sample_fbm: circulant embedding rejected and Cholesky fallback refused for " +
                              std::to_string(n_inc) + " increments (cap " +
                              std::to_string(options.cholesky_max) + ")");
      }
      inc = fgn_cholesky(n_inc, dim, h, normal);
    }
  }
  const double scale = std::pow(grid.dt(), h);
  for (double& v : inc) v *= scale;
  if (method_used) *method_used = method;
  return NoisePath(grid, dim, NoiseKind::fractional, h, integrate_increments(grid, dim, inc));
}

NoisePath d_h_transform(const NoisePath& wiener, const HurstParams& params) {
  require(wiener.kind() == NoiseKind::wiener, "d_h_transform: input must be a Wiener path");
  require_past(wiener, "d_h_transform");
  require_anchored(wiener, "d_h_transform");
  require(params.h > 0.0 && params.h < 1.0 && params.alpha > 0.0, "d_h_transform: invalid Hurst parameters");
  return NoisePath(wiener.grid(), wiener.dim(), NoiseKind::fractional, params.h,
                   moving_average_transform(wiener, params));
}

BhNorm b_h_norm(const NoisePath& path, double h, std::size_t pair_cap) {
  require(path.size() > 0, "b_h_norm: empty path");
  require_past(path, "b_h_norm");
  require_anchored(path, "b_h_norm");
  require(h > 0.0 && h < 1.0, "b_h_norm: hurst index must lie in (0, 1)");
  const Grid& grid = path.grid();
  const std::size_t n = path.size();
  const double exponent = 0.5 * (1.0 - h);
  const int d = path.dim();

  BhNorm result;
  auto visit = [&](std::size_t a, std::size_t b) {
    double sq = 0.0;
    for (int c = 0; c < d; ++c) {
      const double diff = path.at(b, c) - path.at(a, c);
      sq += diff * diff;
    }
    const double ta = std::abs(grid.time(a));
    const double tb = std::abs(grid.time(b));
    const double lag = static_cast<double>(b - a) * grid.dt();
    const double ratio = std::sqrt(sq) / (std::sqrt(1.0 + ta + tb) * std::pow(lag, exponent));
    result.value = std::max(result.value, ratio);
    ++result.pairs_evaluated;
  };

  if (n <= pair_cap) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) visit(a, b);
    }
    return result;
  }

  result.lower_bound = true;
  for (std::size_t a = 0; a + 1 < n; ++a) visit(a, a + 1);
  constexpr std::size_t kLagStrata = 64;
  constexpr std::size_t kStartsPerLag = 256;
  const double log_max = std::log(static_cast<double>(n - 1));
  std::size_t previous_lag = 1;
  for (std::size_t s = 1; s <= kLagStrata; ++s) {
    const auto lag = static_cast<std::size_t>(
        std::llround(std::exp(log_max * static_cast<double>(s) / static_cast<double>(kLagStrata))));
    if (lag <= previous_lag || lag >= n) continue;
    previous_lag = lag;
    const std::size_t starts = n - lag;
    const std::size_t stride = std::max<std::size_t>(1, starts / kStartsPerLag);
    for (std::size_t a = 0; a < starts; a += stride) visit(a, a + lag);
    visit(starts - 1, n - 1);
  }
  return result;
}

NoisePath shift_theta(const NoisePath& past, double t) {
  require_past(past, "shift_theta");
  require_anchored(past, "shift_theta");
  require(t >= 0.0, "shift_theta: t must be >= 0");
  const Grid& grid = past.grid();
  const std::int64_t s = grid.steps_for(t);
  require(s <= -grid.first(), "shift_theta: shift exceeds the path history");
  const Grid out_grid = Grid::past(grid.dt(), -grid.first() - s);
  const auto d = static_cast<std::size_t>(past.dim());
  std::vector<double> values(out_grid.size() * d);
  const auto ref = past.at_step(-s);
  for (std::int64_t i = out_grid.first(); i <= 0; ++i) {
    const auto src = past.at_step(i - s);
    const std::size_t k = out_grid.index_of_step(i);
    for (std::size_t c = 0; c < d; ++c) values[k * d + c] = src[c] - ref[c];
  }
  return NoisePath(out_grid, past.dim(), past.kind(), past.hurst(), std::move(values));
}

NoisePath concat_p(const NoisePath& past, const NoisePath& future, double t) {
  require_past(past, "concat_p");
  require_past(future, "concat_p");
  require_anchored(past, "concat_p");
  require_anchored(future, "concat_p");
  require(past.grid().dt() == future.grid().dt(), "concat_p: grid mismatch (different dt)");
  require(past.dim() == future.dim(), "concat_p: dimension mismatch");
  require(past.kind() == future.kind() && past.hurst() == future.hurst(), "concat_p: noise kind mismatch");
  require(t >= 0.0, "concat_p: t must be >= 0");
  const std::int64_t s = past.grid().steps_for(t);
  require(s <= -future.grid().first(), "concat_p: future segment shorter than t");

  const Grid out_grid = Grid::past(past.grid().dt(), -past.grid().first() + s);
  const auto d = static_cast<std::size_t>(past.dim());
  std::vector<double> values(out_grid.size() * d);
  const auto ref = future.at_step(-s);
  for (std::int64_t i = out_grid.first(); i <= 0; ++i) {
    const auto src = i >= -s ? future.at_step(-i - s) : past.at_step(i + s);
    const std::size_t k = out_grid.index_of_step(i);
    for (std::size_t c = 0; c < d; ++c) values[k * d + c] = src[c] - ref[c];
  }
  return NoisePath(out_grid, past.dim(), past.kind(), past.hurst(), std::move(values));
}

NoisePath advance(const NoisePath& path, double t) {
  const Grid& grid = path.grid();
  const std::int64_t s = grid.steps_for(t);
  require(grid.contains_step(s), "advance: shift leaves the grid");
  const Grid out_grid(grid.dt(), grid.first() - s, grid.last() - s);
  const auto d = static_cast<std::size_t>(path.dim());
  std::vector<double> values(out_grid.size() * d);
  const auto ref = path.at_step(s);
  for (std::int64_t i = out_grid.first(); i <= out_grid.last(); ++i) {
    const auto src = path.at_step(i + s);
    const std::size_t k = out_grid.index_of_step(i);
    for (std::size_t c = 0; c < d; ++c) values[k * d + c] = src[c] - ref[c];
  }
  return NoisePath(out_grid, path.dim(), path.kind(), path.hurst(), std::move(values));
}

NoisePath two_sided_fbm_increments(const NoisePath& past, const NoisePath& future, const HurstParams& params,
                                   double horizon) {
  require(past.kind() == NoiseKind::wiener && future.kind() == NoiseKind::wiener,
          "two_sided_fbm_increments: inputs must be Wiener paths");
  require_past(past, "two_sided_fbm_increments");
  require_past(future, "two_sided_fbm_increments");
  require_anchored(past, "two_sided_fbm_increments");
  require_anchored(future, "two_sided_fbm_increments");
  require(past.grid().dt() == future.grid().dt() && past.dim() == future.dim(),
          "two_sided_fbm_increments: incompatible grids");
  require(horizon >= 0.0, "two_sided_fbm_increments: horizon must be >= 0");
  const std::int64_t hs = past.grid().steps_for(horizon);
  require(hs <= -future.grid().first(), "two_sided_fbm_increments: horizon exceeds the future grid");

  // Two-sided Wiener path X(u) = w-(u) for u <= 0 and w+(-u) for u >= 0;
  // the concatenation P_t(w-, w+) is exactly X(t + .) - X(t).
  const Grid grid(past.grid().dt(), past.grid().first(), hs);
  const auto d = static_cast<std::size_t>(past.dim());
  std::vector<double> values(grid.size() * d);
  for (std::int64_t i = grid.first(); i <= grid.last(); ++i) {
    const auto src = i <= 0 ? past.at_step(i) : future.at_step(-i);
    std::copy(src.begin(), src.end(), values.begin() + static_cast<std::ptrdiff_t>(grid.index_of_step(i) * d));
  }
  const NoisePath two_sided(grid, past.dim(), NoiseKind::wiener, 0.5, std::move(values));
  return NoisePath(grid, past.dim(), NoiseKind::fractional, params.h, moving_average_transform(two_sided, params));
}

NoisePath sample_two_sided_fbm(double dt, double t_min, double t_max, double h, int dim, std::uint64_t seed) {
  return sample_fbm(Grid::span(dt, t_min, t_max), h, dim, seed);
}

}  // namespace fracsync
