#include "doctest.h"

#include <cmath>
#include <memory>

#include "fracsync/fbm.hpp"
#include "fracsync/halton.hpp"
#include "fracsync/integrator.hpp"
#include "fracsync/synchronization.hpp"

using namespace fracsync;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST_CASE("identical initials never separate") {
  const auto f = make_drift(DriftSpec{});
  const NoisePath w = sample_fbm(Grid::future(0.01, 500), 0.6, 2, 1);
  const auto r = n_point_motion(*f, DiffusionMatrix::scaled_identity(1.0, 2), w, {v2(1, 1), v2(1, 1), v2(1, 1)}, 5.0);
  for (double x : r.r_series) CHECK(x == 0.0);
  CHECK_FALSE(r.has_fit);
}

TEST_CASE("two-point distance obeys the Gronwall bound") {
  const auto f = make_drift(DriftSpec{});
  const DriftConstants& c = f->constants();
  const double dt = 1e-3;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NoisePath w = sample_fbm(Grid::future(dt, 5000), 0.3, 2, seed);
    const auto r = n_point_motion(*f, DiffusionMatrix::scaled_identity(0.7, 2), w, {v2(3, -1), v2(-2, 2)}, 5.0);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      CHECK(r.r_series[k] * r.r_series[k] <=
            std::exp(-c.c2f * r.times[k]) * r.initial_r * r.initial_r + c.c1f / c.c2f + 10.0 * dt);
    }
  }
}

TEST_CASE("difference dynamics cancel the noise scale") {
  const auto f = make_drift(DriftSpec{});
  const NoisePath w = sample_fbm(Grid::future(1e-3, 4000), 0.7, 2, 9);
  const auto a = n_point_motion(*f, DiffusionMatrix::scaled_identity(1.0, 2), w, {v2(1, 0), v2(-1, 0.5)}, 4.0);
  const auto b =
      n_point_motion(*f, DiffusionMatrix::scaled_identity(2.0, 2), w.scaled(0.5), {v2(1, 0), v2(-1, 0.5)}, 4.0);
  CHECK(a.r_series == b.r_series);
}

TEST_CASE("decay fit recovers the contraction rate") {
  const OuDrift f(2, 0.8);
  const double dt = 1e-3;
  const NoisePath w = sample_fbm(Grid::future(dt, 9000), 0.5, 2, 2);
  const auto r = n_point_motion(f, DiffusionMatrix::scaled_identity(1.0, 2), w, {v2(1, 0), v2(0, 1)}, 9.0, 10);
  REQUIRE(r.has_fit);
  CHECK(r.decay_rate == doctest::Approx(0.8).epsilon(1e-3));
  CHECK(r.fit_r2 > 0.999999);
  CHECK(r.times.size() == 901);
  CHECK(r.c_bound == doctest::Approx(1e-12 / 0.8));
}

TEST_CASE("blow-up aborts with a partial report") {
  const LinearDrift f(20.0 * Mat::Identity(1, 1));
  const NoisePath w = sample_fbm(Grid::future(0.01, 500), 0.5, 1, 2);
  const auto r = n_point_motion(f, DiffusionMatrix::scaled_identity(1.0, 1), w,
                                {Vec::Constant(1, 1.0), Vec::Constant(1, 2.0)}, 5.0);
  CHECK(r.aborted);
  CHECK(r.abort_time < 5.0);
  CHECK(r.times.back() <= r.abort_time);
}

TEST_CASE("single-linkage clustering") {
  std::vector<Vec> pts{v2(0, 0), v2(0.05, 0), v2(0.1, 0), v2(5, 5), v2(5.02, 5)};
  const auto est = cluster_points(pts, 0.06);
  CHECK(est.p_hat == 2);
  CHECK(est.weights[0] == doctest::Approx(0.6));
  CHECK(est.weights[0] + est.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((est.centers[0] - v2(0.05, 0)).norm() < 1e-12);
  CHECK_FALSE(est.ambiguous);
  const auto touching = cluster_points({v2(0, 0), v2(0.15, 0)}, 0.1);
  CHECK(touching.p_hat == 2);
  CHECK(touching.ambiguous);
}

TEST_CASE("monotone cubic drift collapses to one atom") {
  const CubicDrift f(1);
  const auto sigma = DiffusionMatrix::scaled_identity(1.0, 1);
  const NoisePath w = sample_two_sided_fbm(1e-3, -30.0, 0.0, 0.5, 1, 4);
  std::vector<Vec> initials;
  for (int i = 0; i < 21; ++i) initials.push_back(Vec::Constant(1, -5.0 + 0.5 * i));
  const auto atoms = estimate_atoms(f, sigma, w, initials, 30.0, 1e-3 * f.c_bound());
  CHECK(atoms.p_hat == 1);
  CHECK(atoms.weights[0] == doctest::Approx(1.0));
  CHECK(atoms.max_center_distance <= f.c_bound() + 2.0 * atoms.cluster_radius);
}

TEST_CASE("atoms are carried forward by the flow") {
  const auto f = make_drift(DriftSpec{});
  const auto sigma = DiffusionMatrix::scaled_identity(1.5, 2);
  const double dt = 1e-3, t_back = 30.0, s = 2.0;
  const auto w = std::make_shared<const NoisePath>(sample_two_sided_fbm(dt, -t_back, s, 0.6, 2, 12));
  const auto initials = halton_ball(32, 2, 6.0);
  const double radius = 1e-3 * f->c_bound();
  const auto now = estimate_atoms(*f, sigma, *w, initials, t_back, radius);
  const NoisePath later_driver = advance(*w, s);
  const auto later = estimate_atoms(*f, sigma, later_driver, initials, t_back, radius);
  REQUIRE(now.p_hat == later.p_hat);
  for (std::size_t i = 0; i < now.centers.size(); ++i) {
    const Vec carried = integrate_forward(*f, sigma, w, now.centers[i], s).final_state();
    CHECK((carried - later.centers[i]).norm() < 2.0 * radius);
  }
}

TEST_CASE("attractor diameter along a pullback schedule") {
  const auto f = make_drift(DriftSpec{});
  const auto sigma = DiffusionMatrix::scaled_identity(1.0, 2);
  const NoisePath w = sample_two_sided_fbm(1e-3, -20.0, 0.0, 0.75, 2, 6);
  const auto est = attractor_diameter(*f, sigma, w, 8.0, 24, {0.0, 1.0, 5.0, 20.0});
  REQUIRE(est.size() == 4);
  CHECK(est[0].diameter == doctest::Approx(max_pairwise_distance(halton_ball(24, 2, 8.0))));
  for (std::size_t k = 1; k < est.size(); ++k) CHECK(est[k].diameter <= 1.05 * est[k - 1].diameter);
  const auto doubled = attractor_diameter(*f, sigma, w, 8.0, 48, {20.0});
  CHECK(doubled[0].diameter >= 0.95 * est[3].diameter - 1e-9);
}

TEST_CASE("ergodic averages") {
  const OuDrift f(1, 1.0);
  const auto sigma = DiffusionMatrix::scaled_identity(1.0, 1);
  ErgodicConfig c;
  c.horizon = 20.0;
  c.n_realizations = 64;
  c.dt = 1e-2;
  c.threads = 1;
  const auto ones = ergodic_average_check(f, sigma, 0.5, [](const Vec&) { return 1.0; }, Vec::Zero(1), c);
  CHECK(ones.time_avg == doctest::Approx(1.0));
  CHECK(ones.ensemble_avg == 1.0);
  CHECK(ones.gap == doctest::Approx(0.0).epsilon(1e-12));

  auto clipped = [](const Vec& x) { return std::min(x.squaredNorm(), 4.0); };
  const auto r = ergodic_average_check(f, sigma, 0.5, clipped, Vec::Zero(1), c);
  CHECK(r.gap < 3.0 * std::hypot(r.time_se, r.ensemble_se));
}
