#pragma once

#include <cstdint>
#include <vector>

#include "fracsync/noise_path.hpp"

namespace fracsync {

/// Autocovariance of unit fractional Gaussian noise,
/// gamma(k) = (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}) / 2, for k = 0..n-1.
std::vector<double> fgn_autocovariance(double h, std::size_t n);

enum class FbmMethod { iid, circulant, cholesky };

struct FbmSamplerOptions {
  /// Skip the circulant embedding (used to exercise the fallback).
  bool force_cholesky = false;
  /// Eigenvalues below -tolerance * max eigenvalue reject the embedding.
  double embedding_tolerance = 1e-10;
  /// Largest increment count accepted by the dense fallback.
  std::size_t cholesky_max = 8192;
};

/// Brownian path on `grid`, anchored at 0, with i.i.d. N(0, dt) increments.
NoisePath sample_wiener(const Grid& grid, int dim, std::uint64_t seed);

/// Fractional Brownian motion on `grid` anchored at 0.
///
/// The n-1 increments of every coordinate are an exact fractional Gaussian
/// noise sample (variance dt^{2H}); the circulant embedding is tried first
/// and a dense Cholesky factorisation is the fallback. H = 1/2 is sampled
/// as i.i.d. noise directly. Throws GenerationError when both methods fail.
NoisePath sample_fbm(const Grid& grid, double h, int dim, std::uint64_t seed,
                     const FbmSamplerOptions& options = {}, FbmMethod* method_used = nullptr);

/// Discrete Mandelbrot-van Ness transform of an anchored Wiener path on a
/// past grid. The path is read as piecewise linear and the power-law kernel
/// is integrated exactly on every cell; the past is truncated at t_min.
NoisePath d_h_transform(const NoisePath& wiener, const HurstParams& params);

struct BhNorm {
  double value = 0.0;
  /// True when pairs were subsampled; `value` is then a lower bound.
  bool lower_bound = false;
  std::size_t pairs_evaluated = 0;
};

/// Weighted Hoelder-type norm
///   sup_{s != t} |w(t) - w(s)| / (sqrt(1 + |t| + |s|) |t - s|^{(1-H)/2})
/// over grid node pairs of an anchored past path. Up to `pair_cap` nodes the
/// sup is exact over all pairs; above it, every adjacent pair plus a
/// stratified subsample over log-spaced lags is used.
BhNorm b_h_norm(const NoisePath& path, double h, std::size_t pair_cap = 4096);

/// Shift into the past: out(s) = w(s - t) - w(-t) for s in [t_min + t, 0].
NoisePath shift_theta(const NoisePath& past, double t);

/// Concatenate a future segment in front of a past path:
///   out(s) = w+(-s - t) - w+(-t)   for -t <= s <= 0,
///   out(s) = w-(s + t)  - w+(-t)   for s <= -t,
/// on the grid [t_min - t, 0]. `future` is stored on its own past grid.
NoisePath concat_p(const NoisePath& past, const NoisePath& future, double t);

/// Advance a two-sided path: out(u) = w(u + t) - w(t) on [t_min - t, t_max - t].
NoisePath advance(const NoisePath& path, double t);

/// Two-sided fBm from two Wiener paths via the moving-average construction:
/// B(t) = D_H w-(t) for t <= 0 and B(t) = -(D_H P_t(w-, w+))(-t) for t >= 0,
/// on [t_min, horizon].
NoisePath two_sided_fbm_increments(const NoisePath& past, const NoisePath& future,
                                   const HurstParams& params, double horizon);

/// Two-sided fBm sampled jointly on [t_min, t_max] (the default driver source).
NoisePath sample_two_sided_fbm(double dt, double t_min, double t_max, double h, int dim,
                               std::uint64_t seed);

}  // namespace fracsync
