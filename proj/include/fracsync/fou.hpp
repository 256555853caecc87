#pragma once

#include <vector>

#include "fracsync/diffusion.hpp"
#include "fracsync/drift.hpp"
#include "fracsync/noise_path.hpp"

namespace fracsync {

/// Stationary fractional OU process Z on a past grid [-t_back, 0],
/// dZ = -Z dt + sigma dB^H, started from 0 at -t_back.
struct FouProcess {
  Grid grid;
  int dim = 0;
  /// Node-major values.
  std::vector<double> values;
  double hurst = 0.5;
  DiffusionMatrix sigma;
  /// Weight of the discarded tail, exp(-t_back) sqrt(1 + t_back).
  double truncation_proxy = 0.0;

  Vec at(std::size_t k) const;
};

/// Evaluates Z by integrating the exponential kernel against the driver.
/// The driver is read as piecewise linear, so each cell is integrated exactly:
///   Z_{k+1} = e^{-h} Z_k + sigma dB_k (1 - e^{-h}) / h.
FouProcess fou_evaluate(const DiffusionMatrix& sigma, const NoisePath& driver, double t_back);

/// Constant C^F in the absorbing radius, 2 c1f + (2 / c2f)(1 + c_growth^2).
double absorbing_constant(const DriftModel& drift);

/// Discretized random absorbing radius
///   rho = |Z_0| + sqrt(C^F * int_{-inf}^0 e^{c2f tau} (1 + |Z_tau|)^{2N} dtau),
/// with trapezoidal cell averages against the exact exponential weight and the
/// part before -t_back closed with the value at -t_back.
double absorbing_radius(const DriftModel& drift, const FouProcess& fou);

}  // namespace fracsync
