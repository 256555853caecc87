#pragma once

#include "fracsync/linalg.hpp"

namespace fracsync {

/// Constant additive diffusion sigma with its inverse and operator norms.
struct DiffusionMatrix {
  Mat sigma;
  Mat sigma_inv;
  double op_norm = 0.0;
  double inv_op_norm = 0.0;

  int dim() const noexcept { return static_cast<int>(sigma.rows()); }

  /// kappa * I.
  static DiffusionMatrix scaled_identity(double kappa, int dim);
  /// General invertible sigma; throws ContractViolation when singular.
  static DiffusionMatrix from_matrix(const Mat& sigma);
};

}  // namespace fracsync
