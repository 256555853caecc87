#include "fracsync/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracsync/errors.hpp"

namespace fracsync {
namespace {

// Stand-in for constants that only need to be strictly positive.
constexpr double kNegligible = 1e-12;

double param_or(const DriftSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

double operator_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

double DriftModel::sup_norm_on_ball(double radius) const {
  // Deterministic probe: 65 shells times a golden-ratio spiral of directions.
  const int d = dim();
  double best = 0.0;
  constexpr int kShells = 64;
  constexpr int kDirections = 256;
  for (int s = 0; s <= kShells; ++s) {
    const double r = radius * s / kShells;
    for (int k = 0; k < kDirections; ++k) {
      Vec x = Vec::Zero(d);
      for (int c = 0; c < d; ++c) {
        const double phase = std::fmod((k + 1) * (c + 1) * std::numbers::phi, 1.0);
        x[c] = std::cos(2.0 * std::numbers::pi * phase + c);
      }
      if (x.norm() == 0.0) continue;
      x *= r / x.norm();
      best = std::max(best, evaluate(x).norm());
    }
  }
  return best;
}

LinearDrift::LinearDrift(Mat a) : a_(std::move(a)) {
  require(a_.rows() == a_.cols() && a_.rows() >= 1 && a_.rows() <= kMaxDim, "linear drift: matrix must be square");
  const Mat sym = 0.5 * (a_ + a_.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const double mu = eig.eigenvalues().maxCoeff();
  const double norm = operator_norm(a_);
  constants_.certified = mu < 0.0;
  constants_.c1f = kNegligible;
  constants_.c2f = mu < 0.0 ? -mu : kNegligible;
  constants_.c3f = std::max(mu, 0.0) + kNegligible;
  constants_.c4f = mu < 0.0 ? -mu : kNegligible;
  constants_.r_mono = 1.0;
  constants_.c_growth = std::max(norm, kNegligible);
  constants_.n_growth = 1;
  constants_.lipschitz = norm;
}

double LinearDrift::sup_norm_on_ball(double radius) const { return operator_norm(a_) * radius; }

OuDrift::OuDrift(int dim, double theta) : dim_(dim), theta_(theta) {
  require(dim >= 1 && dim <= kMaxDim, "ou drift: unsupported dimension");
  require(theta > 0.0, "ou drift: theta must be positive");
  constants_.c1f = kNegligible;
  constants_.c2f = theta;
  constants_.c3f = kNegligible;
  constants_.c4f = theta;
  constants_.r_mono = 1.0;
  constants_.c_growth = theta;
  constants_.n_growth = 1;
  constants_.lipschitz = theta;
}

CubicDrift::CubicDrift(int dim) : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, "cubic drift: unsupported dimension");
  // <a|a|^2 - b|b|^2, a - b> >= |a - b|^4 / 4 and >= (|a|^2 + |b|^2) |a - b|^2 / 2.
  constants_.c1f = 1.0;
  constants_.c2f = 1.0;
  constants_.c3f = kNegligible;
  constants_.c4f = 1.0;
  constants_.r_mono = 1.0;
  constants_.c_growth = 1.0;
  constants_.n_growth = 3;
  constants_.lipschitz = std::numeric_limits<double>::infinity();
}

Mat CubicDrift::jacobian(const Vec& x) const {
  return -(x.squaredNorm() * Mat::Identity(dim_, dim_) + 2.0 * x * x.transpose());
}

RadialPitchforkDrift::RadialPitchforkDrift(int dim, double r_inner, double r_outer)
    : dim_(dim), r_inner_(r_inner), r_outer_(r_outer) {
  require(dim >= 1 && dim <= kMaxDim, "example drift: unsupported dimension");
  require(r_inner > 0.0 && r_outer > r_inner, "example drift: need 0 < r_inner < r_outer");

  // Quintic Hermite in s = (r - r_inner) / L matching f, f', f'' at both ends.
  const double len = r_outer - r_inner;
  const double r1 = r_inner;
  const double f0 = r1 - r1 * r1 * r1, f1 = (1.0 - 3.0 * r1 * r1) * len, f2 = -6.0 * r1 * len * len;
  const double g0 = -r_outer, g1 = -len, g2 = 0.0;
  Eigen::Matrix<double, 6, 6> a;
  a << 1, 0, 0, 0, 0, 0,
       0, 1, 0, 0, 0, 0,
       0, 0, 2, 0, 0, 0,
       1, 1, 1, 1, 1, 1,
       0, 1, 2, 3, 4, 5,
       0, 0, 2, 6, 12, 20;
  Eigen::Matrix<double, 6, 1> b;
  b << f0, f1, f2, g0, g1, g2;
  const Eigen::Matrix<double, 6, 1> coef = a.fullPivLu().solve(b);
  for (int i = 0; i < 6; ++i) hermite_[static_cast<std::size_t>(i)] = coef[i];

  // Constants from a dense radial scan; beyond r_outer F(x) = -x exactly.
  double g_max = 0.0, c3 = 0.0, lip = 0.0, growth = 0.0;
  constexpr int kScan = 200000;
  for (int i = 0; i <= kScan; ++i) {
    const double r = r_outer * i / kScan;
    const double ph = phi(r);
    const double slope = profile_slope(r);
    g_max = std::max(g_max, std::abs(profile(r) + r));
    c3 = std::max({c3, ph, slope});
    lip = std::max({lip, std::abs(ph), std::abs(slope)});
    growth = std::max(growth, std::abs(ph));
  }
  constexpr double kScanMargin = 1.001;
  g_max *= kScanMargin;
  // F = -x + G with |G| <= g_max and G = 0 outside r_outer gives
  // <F(a) - F(b), a - b> <= -|z|^2 + 2 g_max |z| <= 2 g_max^2 - |z|^2 / 2.
  constants_.c1f = 2.0 * g_max * g_max;
  constants_.c2f = 0.5;
  constants_.c3f = std::max(c3 * kScanMargin, kNegligible);
  constants_.c4f = 1.0;
  constants_.r_mono = r_outer;
  constants_.c_growth = std::max(growth, 1.0) * kScanMargin;
  constants_.n_growth = 1;
  constants_.lipschitz = std::max(lip, 1.0) * kScanMargin;
}

double RadialPitchforkDrift::profile(double r) const {
  if (r <= r_inner_) return r - r * r * r;
  if (r >= r_outer_) return -r;
  const double s = (r - r_inner_) / (r_outer_ - r_inner_);
  double v = 0.0;
  for (int i = 5; i >= 0; --i) v = v * s + hermite_[static_cast<std::size_t>(i)];
  return v;
}

double RadialPitchforkDrift::profile_slope(double r) const {
  if (r <= r_inner_) return 1.0 - 3.0 * r * r;
  if (r >= r_outer_) return -1.0;
  const double s = (r - r_inner_) / (r_outer_ - r_inner_);
  double v = 0.0;
  for (int i = 5; i >= 1; --i) v = v * s + i * hermite_[static_cast<std::size_t>(i)];
  return v / (r_outer_ - r_inner_);
}

double RadialPitchforkDrift::phi(double r) const {
  if (r <= r_inner_) return 1.0 - r * r;
  if (r >= r_outer_) return -1.0;
  return profile(r) / r;
}

// d phi / dr divided by r, so that DF = phi I + phi_slope * x x^T.
double RadialPitchforkDrift::phi_slope(double r) const {
  if (r <= r_inner_) return -2.0;
  if (r >= r_outer_) return 0.0;
  return (profile_slope(r) * r - profile(r)) / (r * r * r);
}

Vec RadialPitchforkDrift::evaluate(const Vec& x) const { return phi(x.norm()) * x; }

Mat RadialPitchforkDrift::jacobian(const Vec& x) const {
  const double r = x.norm();
  return phi(r) * Mat::Identity(dim_, dim_) + phi_slope(r) * x * x.transpose();
}

double RadialPitchforkDrift::sup_norm_on_ball(double radius) const {
  double best = 0.0;
  const double top = std::min(radius, r_outer_);
  constexpr int kScan = 20000;
  for (int i = 0; i <= kScan; ++i) best = std::max(best, std::abs(profile(top * i / kScan)));
  if (radius > r_outer_) best = std::max(best, radius);
  return best;
}

std::shared_ptr<const DriftModel> make_drift(const DriftSpec& spec) {
  require(spec.dim >= 1 && spec.dim <= kMaxDim, "drift: dimension must lie in [1, 8]");
  if (spec.name == "example_sec5") {
    return std::make_shared<RadialPitchforkDrift>(spec.dim, param_or(spec, "r_inner", 1.2),
                                                  param_or(spec, "r_outer", 1.8));
  }
  if (spec.name == "linear") {
    Mat a(spec.dim, spec.dim);
    if (!spec.matrix.empty()) {
      require(spec.matrix.size() == static_cast<std::size_t>(spec.dim * spec.dim),
              "linear drift: matrix must have dim * dim entries");
      for (int i = 0; i < spec.dim; ++i) {
        for (int j = 0; j < spec.dim; ++j) a(i, j) = spec.matrix[static_cast<std::size_t>(i * spec.dim + j)];
      }
    } else {
      a = -param_or(spec, "a", 1.0) * Mat::Identity(spec.dim, spec.dim);
    }
    return std::make_shared<LinearDrift>(a);
  }
  if (spec.name == "ou") return std::make_shared<OuDrift>(spec.dim, param_or(spec, "theta", 1.0));
  if (spec.name == "cubic") return std::make_shared<CubicDrift>(spec.dim);
  throw ContractViolation("drift: unknown model '" + spec.name + "'");
}

std::vector<std::string> registered_drifts() { return {"example_sec5", "linear", "ou", "cubic"}; }

}  // namespace fracsync
