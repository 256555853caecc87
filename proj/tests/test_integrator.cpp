#include "doctest.h"

#include <cmath>
#include <memory>

#include "fracsync/errors.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/integrator.hpp"
#include "support.hpp"

using namespace fracsync;

namespace {

std::shared_ptr<const NoisePath> driver(double dt, double t_min, double t_max, double h, int dim, std::uint64_t seed) {
  return std::make_shared<const NoisePath>(sample_two_sided_fbm(dt, t_min, t_max, h, dim, seed));
}

}  // namespace

TEST_CASE("zero drift integrates the noise exactly") {
  const LinearDrift zero(Mat::Zero(2, 2));
  const auto sigma = DiffusionMatrix::from_matrix((Mat(2, 2) << 1.0, 0.5, 0.0, 2.0).finished());
  const auto w = driver(0.01, 0.0, 5.0, 0.3, 2, 1);
  const Vec x0 = (Vec(2) << 1.0, -1.0).finished();
  const CocycleRun run = integrate_forward(zero, sigma, w, x0, 5.0);
  REQUIRE(run.size() == 501);
  CHECK((run.state(0) - x0).norm() == 0.0);
  for (std::size_t k = 0; k < run.size(); ++k) {
    const Vec expected = x0 + sigma.sigma * to_vec(w->at(w->grid().index_of_step(static_cast<std::int64_t>(k))));
    CHECK((run.state(k) - expected).norm() < 1e-12);
  }
}

TEST_CASE("linear decay without noise follows the exponential") {
  const OuDrift f(2, 1.0);
  const auto sigma = DiffusionMatrix::scaled_identity(1.0, 2);
  const double dt = 1e-3;
  const auto w = std::make_shared<const NoisePath>(
      NoisePath::zeros(Grid::future(dt, 3000), 2, NoiseKind::fractional, 0.7));
  const Vec x0 = (Vec(2) << 2.0, -0.5).finished();
  IntegratorOptions options;
  options.with_jacobian = true;
  const CocycleRun run = integrate_forward(f, sigma, w, x0, 3.0, options);
  CHECK(run.jacobians.front() == Mat::Identity(2, 2));
  for (std::size_t k = 0; k < run.size(); k += 500) {
    const double t = run.times[k];
    CHECK((run.state(k) - x0 * std::exp(-t)).norm() < 3.0 * dt * dt * t * x0.norm() + 1e-15);
    CHECK((run.jacobians[k] - std::exp(-t) * Mat::Identity(2, 2)).norm() < 3.0 * dt * dt * t + 1e-15);
  }
}

TEST_CASE("cocycle: splitting the horizon with the advanced driver") {
  const auto f = make_drift(DriftSpec{});
  NormalSource normal(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = driver(0.01, 0.0, 6.0, 0.25 + 0.025 * trial, 2, static_cast<std::uint64_t>(trial));
    const auto sigma = DiffusionMatrix::scaled_identity(0.5 + normal.uniform(), 2);
    const Vec x0 = testing::random_vec(normal, 2, 2.0);
    const Vec whole = integrate_forward(*f, sigma, w, x0, 6.0).final_state();
    const Vec mid = integrate_forward(*f, sigma, w, x0, 2.5).final_state();
    const auto shifted = std::make_shared<const NoisePath>(advance(*w, 2.5));
    const Vec split = integrate_forward(*f, sigma, shifted, mid, 3.5).final_state();
    CHECK((whole - split).norm() < 1e-12 * (1.0 + whole.norm()));
  }
}

TEST_CASE("pullback basics") {
  const auto f = make_drift(DriftSpec{});
  const auto sigma = DiffusionMatrix::scaled_identity(1.0, 2);
  const auto w = driver(0.01, -8.0, 0.0, 0.4, 2, 3);
  const Vec x0 = (Vec(2) << 0.3, 0.1).finished();
  CHECK((pullback_solve(*f, sigma, *w, x0, 0.0) - x0).norm() == 0.0);

  // Nesting: pull back over a, then continue for b on the matching segment.
  const Vec over_a = pullback_solve(*f, sigma, *w, x0, 8.0);
  const CocycleRun part = integrate_range(*f, sigma, w, x0, -800, -300);
  const CocycleRun rest = integrate_range(*f, sigma, w, part.final_state(), -300, 0);
  CHECK((rest.final_state() - over_a).norm() < 1e-13);
  CHECK_THROWS_AS(pullback_solve(*f, sigma, *w, x0, 9.0), ContractViolation);
}

TEST_CASE("OU pullback point converges to the stationary OU value") {
  const OuDrift f(1, 1.0);
  const auto sigma = DiffusionMatrix::scaled_identity(1.0, 1);
  const double dt = 1e-3;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto w = driver(dt, -30.0, 0.0, 0.5, 1, seed);
    const FouProcess z = fou_evaluate(sigma, *w, 30.0);
    const double target = z.at(z.grid.size() - 1)[0];
    const Vec x0 = Vec::Constant(1, 3.0);
    const double near = pullback_solve(f, sigma, *w, x0, 5.0)[0];
    const double far = pullback_solve(f, sigma, *w, x0, 30.0)[0];
    CHECK(std::abs(far - target) < 10.0 * dt);
    CHECK(std::abs(far - target) < std::abs(near - target));
  }
}

TEST_CASE("jacobian matches finite differences at first order") {
  const auto f = make_drift(DriftSpec{});
  const auto sigma = DiffusionMatrix::scaled_identity(0.8, 2);
  const auto w = driver(0.01, 0.0, 4.0, 0.6, 2, 17);
  const Vec x0 = (Vec(2) << 0.9, -0.6).finished();
  const Vec v = (Vec(2) << 0.6, 0.8).finished();
  IntegratorOptions options;
  options.with_jacobian = true;
  const CocycleRun base = integrate_forward(*f, sigma, w, x0, 4.0, options);
  const Vec jv = base.jacobians.back() * v;
  std::vector<double> errors;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const Vec moved = integrate_forward(*f, sigma, w, x0 + eps * v, 4.0).final_state();
    errors.push_back((jv - (moved - base.final_state()) / eps).norm());
  }
  const double order = std::log10(errors[0] / errors[2]) / 2.0;
  CHECK(order >= 0.9);
}

TEST_CASE("pathwise Gronwall bound and one-step contraction") {
  const auto f = make_drift(DriftSpec{});
  const DriftConstants& c = f->constants();
  const double dt = 1e-3;
  const double eps_int = 10.0 * dt;
  NormalSource normal(21);
  for (int pair = 0; pair < 10; ++pair) {
    const auto w = driver(dt, 0.0, 5.0, 0.5, 2, static_cast<std::uint64_t>(pair));
    const auto sigma = DiffusionMatrix::scaled_identity(1.0, 2);
    const Vec x = testing::random_vec(normal, 2, 3.0);
    const Vec y = testing::random_vec(normal, 2, 3.0);
    const CocycleRun a = integrate_forward(*f, sigma, w, x, 5.0);
    const CocycleRun b = integrate_forward(*f, sigma, w, y, 5.0);
    const double d0 = (x - y).squaredNorm();
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double dk = (a.state(k) - b.state(k)).squaredNorm();
      CHECK(dk <= std::exp(-c.c2f * a.times[k]) * d0 + c.c1f / c.c2f + eps_int);
      if (k + 1 == a.size()) break;
      const double next = (a.state(k + 1) - b.state(k + 1)).squaredNorm();
      if (dk == 0.0) continue;
      CHECK(next <= dk * std::exp(2.0 * c.c3f * dt) * (1.0 + eps_int));
      if (a.state(k).norm() >= c.r_mono && b.state(k).norm() >= c.r_mono && a.state(k + 1).norm() >= c.r_mono &&
          b.state(k + 1).norm() >= c.r_mono) {
        CHECK(next <= dk * std::exp(-2.0 * c.c4f * dt) * (1.0 + eps_int));
      }
    }
  }
}

TEST_CASE("state differences do not see the noise") {
  const auto f = make_drift(DriftSpec{});
  const auto w = driver(1e-3, 0.0, 3.0, 0.3, 2, 5);
  const auto half = std::make_shared<const NoisePath>(w->scaled(0.5));
  const Vec x = (Vec(2) << 1.0, 0.0).finished();
  const Vec y = (Vec(2) << -0.5, 0.7).finished();
  const auto one = DiffusionMatrix::scaled_identity(1.0, 2);
  const auto two = DiffusionMatrix::scaled_identity(2.0, 2);
  const CocycleRun a1 = integrate_forward(*f, one, w, x, 3.0);
  const CocycleRun b1 = integrate_forward(*f, one, w, y, 3.0);
  const CocycleRun a2 = integrate_forward(*f, two, half, x, 3.0);
  const CocycleRun b2 = integrate_forward(*f, two, half, y, 3.0);
  for (std::size_t k = 0; k < a1.size(); ++k) {
    CHECK((a1.state(k) - b1.state(k)) == (a2.state(k) - b2.state(k)));
  }
}

TEST_CASE("blow-up reports the last finite time") {
  const LinearDrift f(20.0 * Mat::Identity(1, 1));
  const auto w = driver(0.01, 0.0, 5.0, 0.5, 1, 1);
  try {
    integrate_forward(f, DiffusionMatrix::scaled_identity(1.0, 1), w, Vec::Constant(1, 1.0), 5.0);
    FAIL("expected a blow-up");
  } catch (const IntegrationError& e) {
    CHECK(e.last_finite_time() > 0.5);
    CHECK(e.last_finite_time() < 1.5);
  }
}

TEST_CASE("large drift steps raise the warning flag and strides thin the record") {
  const CubicDrift f(1);
  const auto w = driver(0.01, 0.0, 1.0, 0.5, 1, 1);
  IntegratorOptions options;
  options.record_stride = 30;
  const CocycleRun run = integrate_forward(f, DiffusionMatrix::scaled_identity(0.1, 1), w, Vec::Constant(1, 4.0), 1.0,
                                           options);
  CHECK(run.step_warning);
  CHECK(run.size() == 5);
  CHECK(run.times.back() == doctest::Approx(1.0));
  const CocycleRun calm = integrate_forward(f, DiffusionMatrix::scaled_identity(0.1, 1), w, Vec::Constant(1, 0.5), 1.0);
  CHECK_FALSE(calm.step_warning);
}
