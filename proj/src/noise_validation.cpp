#include "fracsync/noise_validation.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "fracsync/errors.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/parallel.hpp"
#include "fracsync/rng.hpp"

namespace fracsync {
namespace {

constexpr std::uint64_t kWhitenessTag = 0x77;

std::vector<double> unit_increments(const NoisePath& path, double h) {
  const double scale = std::pow(path.grid().dt(), -h);
  std::vector<double> inc(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) inc[i] = (path.at(i + 1, 0) - path.at(i, 0)) * scale;
  return inc;
}

}  // namespace

double ljung_box(const std::vector<double>& series, std::size_t lags) {
  const std::size_t n = series.size();
  require(n > lags + 1, "ljung_box: series too short");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  double q = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) ck += (series[i] - mean) * (series[i + k] - mean);
    const double rho = ck / c0;
    q += rho * rho / static_cast<double>(n - k);
  }
  const double nn = static_cast<double>(n);
  return nn * (nn + 2.0) * q;
}

NoiseValidation validate_noise(const NoiseValidationConfig& config) {
  require(config.nodes > config.max_lag + 2, "validate-noise: too few nodes for the requested lags");
  require(config.paths >= 2, "validate-noise: need at least two paths");
  const Grid grid = Grid::future(config.dt, static_cast<std::int64_t>(config.nodes - 1));
  const int threads = resolve_thread_count(config.threads);
  const std::size_t lags = config.max_lag + 1;

  NoiseValidation out;
  out.pass = true;
  for (std::size_t hi = 0; hi < config.hursts.size(); ++hi) {
    const double h = config.hursts[hi];
    const auto paths = static_cast<std::size_t>(config.paths);
    std::vector<double> per_path(paths * lags);
    parallel_for(paths, threads, [&](std::size_t p) {
      const NoisePath path = sample_fbm(grid, h, 1, seed_stream(config.seed, p, hi));
      const std::vector<double> inc = unit_increments(path, h);
      for (std::size_t k = 0; k < lags; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k < inc.size(); ++i) acc += inc[i] * inc[i + k];
        per_path[p * lags + k] = acc / static_cast<double>(inc.size() - k);
      }
    });
    const std::vector<double> gamma = fgn_autocovariance(h, lags);
    for (std::size_t k = 0; k < lags; ++k) {
      double mean = 0.0;
      for (std::size_t p = 0; p < paths; ++p) mean += per_path[p * lags + k];
      mean /= static_cast<double>(paths);
      double var = 0.0;
      for (std::size_t p = 0; p < paths; ++p) var += std::pow(per_path[p * lags + k] - mean, 2);
      var /= static_cast<double>(paths - 1);
      CovarianceCheck check;
      check.h = h;
      check.lag = k;
      check.empirical = mean;
      check.analytic = gamma[k];
      check.std_err = std::sqrt(var / static_cast<double>(paths));
      const double reference = std::abs(gamma[k]) > 1e-12 ? std::abs(gamma[k]) : gamma[0];
      check.rel_error = std::abs(mean - gamma[k]) / reference;
      check.pass = check.rel_error <= config.rel_tolerance;
      out.pass = out.pass && check.pass;
      out.covariances.push_back(check);
    }

    if (h == 0.5 && config.whiteness_seeds > 0) {
      WhitenessCheck white;
      white.seeds = config.whiteness_seeds;
      boost::math::chi_squared_distribution<double> chi2(static_cast<double>(config.whiteness_lags));
      white.critical_value = boost::math::quantile(chi2, 1.0 - config.whiteness_level);
      std::vector<int> ok(static_cast<std::size_t>(config.whiteness_seeds));
      parallel_for(ok.size(), threads, [&](std::size_t s) {
        const NoisePath path = sample_fbm(grid, 0.5, 1, seed_stream(config.seed, s, kWhitenessTag));
        ok[s] = ljung_box(unit_increments(path, 0.5), config.whiteness_lags) <= white.critical_value ? 1 : 0;
      });
      for (int v : ok) white.passed += v;
      white.pass = white.passed >= static_cast<int>(std::ceil(config.whiteness_min_fraction * white.seeds));
      out.pass = out.pass && white.pass;
      out.whiteness = white;
    }
  }
  return out;
}

}  // namespace fracsync
