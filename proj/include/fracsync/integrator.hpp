#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fracsync/diffusion.hpp"
#include "fracsync/drift.hpp"
#include "fracsync/noise_path.hpp"

namespace fracsync {

/// States beyond this norm count as a blow-up.
inline constexpr double kBlowUpNorm = 1e8;

/// One Heun step of dx = F(x) dt + g with the noise increment g = sigma dB
/// added exactly:
///   x~ = x + h F(x) + g,   x' = x + h/2 (F(x) + F(x~)) + g.
/// The tangent update is the exact derivative of that map,
///   M~ = (I + h DF(x)) M,  M' = M + h/2 (DF(x) M + DF(x~) M~),
/// so finite differences of the state scheme converge to it.
class HeunScheme {
 public:
  HeunScheme(const DriftModel& drift, double dt) : drift_(&drift), dt_(dt) {}

  double dt() const noexcept { return dt_; }

  /// Advances `x`; returns |F(x)| dt at the start of the step.
  double step(Vec& x, const Vec& g) const {
    const Vec f0 = drift_->evaluate(x);
    const Vec trial = x + dt_ * f0 + g;
    const Vec f1 = drift_->evaluate(trial);
    x += 0.5 * dt_ * (f0 + f1) + g;
    return f0.norm() * dt_;
  }

  /// Advances `x` and a tangent (vector or matrix) together.
  template <class Tangent>
  double step(Vec& x, Tangent& tangent, const Vec& g) const {
    const Vec f0 = drift_->evaluate(x);
    const Mat j0 = drift_->jacobian(x);
    const Vec trial = x + dt_ * f0 + g;
    const Vec f1 = drift_->evaluate(trial);
    const Mat j1 = drift_->jacobian(trial);
    const Tangent j0m = j0 * tangent;
    const Tangent trial_tangent = tangent + dt_ * j0m;
    tangent += 0.5 * dt_ * (j0m + j1 * trial_tangent);
    x += 0.5 * dt_ * (f0 + f1) + g;
    return f0.norm() * dt_;
  }

 private:
  const DriftModel* drift_;
  double dt_;
};

struct IntegratorOptions {
  bool with_jacobian = false;
  /// Runs whose |F| dt exceeds this on some step carry a warning flag.
  double step_bound = 0.5;
  /// Keep every `record_stride`-th node (the last node is always kept).
  std::size_t record_stride = 1;
};

/// A realized trajectory of the cocycle together with its driver.
struct CocycleRun {
  /// Times of the recorded nodes.
  std::vector<double> times;
  /// Recorded states, node-major (times.size() * dim values).
  std::vector<double> states;
  /// Jacobians D_x Phi at the recorded nodes when requested.
  std::vector<Mat> jacobians;
  std::shared_ptr<const NoisePath> driver;
  /// Driver steps covered: [first_step, last_step].
  std::int64_t first_step = 0;
  std::int64_t last_step = 0;
  Vec x0;
  int dim = 0;
  bool step_warning = false;

  std::size_t size() const noexcept { return times.size(); }
  Vec state(std::size_t k) const;
  Vec final_state() const { return state(size() - 1); }
};

/// sigma * (B(t_{i+1}) - B(t_i)) for driver step i.
Vec noise_increment(const DiffusionMatrix& sigma, const NoisePath& driver, std::int64_t step);

/// Integrates from driver step `first_step` to `last_step`.
CocycleRun integrate_range(const DriftModel& drift, const DiffusionMatrix& sigma,
                           std::shared_ptr<const NoisePath> driver, const Vec& x0, std::int64_t first_step,
                           std::int64_t last_step, const IntegratorOptions& options = {});

/// Phi^t_omega(x0) for t in [0, horizon].
CocycleRun integrate_forward(const DriftModel& drift, const DiffusionMatrix& sigma,
                             std::shared_ptr<const NoisePath> driver, const Vec& x0, double horizon,
                             const IntegratorOptions& options = {});

/// Pullback image: integrate from -t_back to 0 and return the state at 0.
Vec pullback_solve(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver, const Vec& x0,
                   double t_back);

/// Pullback images of several initial states over the same driver segment.
std::vector<Vec> pullback_solve_many(const DriftModel& drift, const DiffusionMatrix& sigma, const NoisePath& driver,
                                     const std::vector<Vec>& initials, double t_back);

/// Throws IntegrationError when `x` is non-finite or beyond kBlowUpNorm.
void check_finite_state(const Vec& x, double t, double last_good_time);

}  // namespace fracsync
