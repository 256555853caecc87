#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fracsync/linalg.hpp"

namespace fracsync {

/// Constants certified for a drift F:
///   <F(a) - F(b), a - b> <= min{c1f - c2f |a - b|^2, c3f |a - b|^2},
///   <F(x) - F(y), x - y> <= -c4f |x - y|^2  whenever |x|, |y| >= r_mono,
///   |F(x)| <= c_growth (1 + |x|)^n_growth.
/// `lipschitz` is sup |DF| (infinite when DF is unbounded). When
/// `certified` is false the dissipativity bounds do not hold globally
/// (e.g. a linear drift with indefinite symmetric part).
struct DriftConstants {
  double c1f = 0.0;
  double c2f = 0.0;
  double c3f = 0.0;
  double c4f = 0.0;
  double r_mono = 0.0;
  double c_growth = 0.0;
  int n_growth = 1;
  double lipschitz = 0.0;
  bool certified = true;
};

class DriftModel {
 public:
  virtual ~DriftModel() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual Vec evaluate(const Vec& x) const = 0;
  virtual Mat jacobian(const Vec& x) const = 0;

  /// sup of |F| over the closed ball B(0, radius).
  virtual double sup_norm_on_ball(double radius) const;

  const DriftConstants& constants() const noexcept { return constants_; }
  /// Bound on the pairwise distance of the pullback atoms, c1f / c2f.
  double c_bound() const noexcept { return constants_.c1f / constants_.c2f; }

 protected:
  DriftConstants constants_;
};

/// F(x) = A x.
class LinearDrift final : public DriftModel {
 public:
  explicit LinearDrift(Mat a);
  int dim() const override { return static_cast<int>(a_.rows()); }
  std::string name() const override { return "linear"; }
  Vec evaluate(const Vec& x) const override { return a_ * x; }
  Mat jacobian(const Vec&) const override { return a_; }
  double sup_norm_on_ball(double radius) const override;
  const Mat& matrix() const noexcept { return a_; }

 private:
  Mat a_;
};

/// F(x) = -theta x.
class OuDrift final : public DriftModel {
 public:
  OuDrift(int dim, double theta);
  int dim() const override { return dim_; }
  std::string name() const override { return "ou"; }
  Vec evaluate(const Vec& x) const override { return -theta_ * x; }
  Mat jacobian(const Vec&) const override { return -theta_ * Mat::Identity(dim_, dim_); }
  double sup_norm_on_ball(double radius) const override { return theta_ * radius; }

 private:
  int dim_;
  double theta_;
};

/// F(x) = -x |x|^2, monotone and order preserving in d = 1.
class CubicDrift final : public DriftModel {
 public:
  explicit CubicDrift(int dim);
  int dim() const override { return dim_; }
  std::string name() const override { return "cubic"; }
  Vec evaluate(const Vec& x) const override { return -x.squaredNorm() * x; }
  Mat jacobian(const Vec& x) const override;
  double sup_norm_on_ball(double radius) const override { return radius * radius * radius; }

 private:
  int dim_;
};

/// Radial pitchfork with a linear far field:
///   F(x) = x - x |x|^2   for |x| <= r_inner,
///   F(x) = -x            for |x| >= r_outer,
/// joined on the annulus by the quintic Hermite profile in |x| that matches
/// value, slope and curvature at both radii, so F is C^2 with bounded DF.
class RadialPitchforkDrift final : public DriftModel {
 public:
  RadialPitchforkDrift(int dim, double r_inner, double r_outer);
  int dim() const override { return dim_; }
  std::string name() const override { return "example_sec5"; }
  Vec evaluate(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  double sup_norm_on_ball(double radius) const override;

  /// Radial profile f(r) = r * phi(r) and its derivative f'(r).
  double profile(double r) const;
  double profile_slope(double r) const;

 private:
  double phi(double r) const;
  double phi_slope(double r) const;

  int dim_;
  double r_inner_;
  double r_outer_;
  std::array<double, 6> hermite_{};
};

/// Registry entry: drift name plus numeric parameters from a config file.
struct DriftSpec {
  std::string name = "example_sec5";
  int dim = 2;
  std::map<std::string, double> params;
  /// Row-major d x d matrix for "linear" (optional; -a I otherwise).
  std::vector<double> matrix;
};

/// Builds a registered drift: "example_sec5", "linear", "ou", "cubic".
std::shared_ptr<const DriftModel> make_drift(const DriftSpec& spec);
std::vector<std::string> registered_drifts();

}  // namespace fracsync
