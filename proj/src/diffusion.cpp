#include "fracsync/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "fracsync/errors.hpp"

namespace fracsync {

DiffusionMatrix DiffusionMatrix::scaled_identity(double kappa, int dim) {
  require(dim >= 1 && dim <= kMaxDim, "diffusion: unsupported dimension");
  require(kappa > 0.0 && std::isfinite(kappa), "diffusion: kappa must be positive and finite");
  DiffusionMatrix out;
  out.sigma = kappa * Mat::Identity(dim, dim);
  out.sigma_inv = (1.0 / kappa) * Mat::Identity(dim, dim);
  out.op_norm = kappa;
  out.inv_op_norm = 1.0 / kappa;
  return out;
}

DiffusionMatrix DiffusionMatrix::from_matrix(const Mat& sigma) {
  require(sigma.rows() == sigma.cols() && sigma.rows() >= 1 && sigma.rows() <= kMaxDim,
          "diffusion: sigma must be square with dimension in [1, 8]");
  require(sigma.allFinite(), "diffusion: sigma has non-finite entries");
  Eigen::JacobiSVD<Mat> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double largest = s(0);
  const double smallest = s(s.size() - 1);
  require(smallest > 1e-12 * std::max(largest, 1.0), "diffusion: sigma is singular");
  DiffusionMatrix out;
  out.sigma = sigma;
  out.sigma_inv = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  out.op_norm = largest;
  out.inv_op_norm = 1.0 / smallest;
  const double residual = (out.sigma * out.sigma_inv - Mat::Identity(sigma.rows(), sigma.cols())).norm();
  require(residual < 1e-10, "diffusion: sigma is too ill-conditioned to invert");
  return out;
}

}  // namespace fracsync
