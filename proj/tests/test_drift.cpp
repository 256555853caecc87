#include "doctest.h"

#include <cmath>
#include <memory>
#include <vector>

#include "fracsync/drift.hpp"
#include "fracsync/errors.hpp"
#include "support.hpp"

using namespace fracsync;

namespace {

std::vector<std::shared_ptr<const DriftModel>> all_drifts() {
  DriftSpec pitchfork;
  DriftSpec pitchfork3{"example_sec5", 3, {}, {}};
  DriftSpec linear{"linear", 2, {}, {-1.0, 0.5, -0.3, -2.0}};
  DriftSpec ou{"ou", 3, {{"theta", 0.7}}, {}};
  DriftSpec cubic{"cubic", 2, {}, {}};
  return {make_drift(pitchfork), make_drift(pitchfork3), make_drift(linear), make_drift(ou), make_drift(cubic)};
}

Vec random_point(NormalSource& normal, int dim, double radius) {
  Vec v = testing::random_vec(normal, dim);
  return v * (radius * normal.uniform() / v.norm());
}

}  // namespace

TEST_CASE("sampled one-sided dissipativity") {
  NormalSource normal(1);
  for (const auto& drift : all_drifts()) {
    const DriftConstants& c = drift->constants();
    REQUIRE(c.certified);
    int violations = 0;
    for (int i = 0; i < 20000; ++i) {
      const double scale = std::pow(10.0, 1.5 * normal.uniform());
      const Vec a = random_point(normal, drift->dim(), scale);
      const Vec b = random_point(normal, drift->dim(), scale);
      const double z2 = (a - b).squaredNorm();
      const double lhs = (drift->evaluate(a) - drift->evaluate(b)).dot(a - b);
      const double rhs = std::min(c.c1f - c.c2f * z2, c.c3f * z2);
      if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) ++violations;
    }
    INFO(drift->name());
    CHECK(violations == 0);
  }
}

TEST_CASE("sampled eventual monotonicity and growth") {
  NormalSource normal(2);
  for (const auto& drift : all_drifts()) {
    const DriftConstants& c = drift->constants();
    int violations = 0;
    for (int i = 0; i < 20000; ++i) {
      Vec a = testing::random_vec(normal, drift->dim());
      Vec b = testing::random_vec(normal, drift->dim());
      a *= (c.r_mono + 5.0 * normal.uniform()) / a.norm();
      b *= (c.r_mono + 5.0 * normal.uniform()) / b.norm();
      const double lhs = (drift->evaluate(a) - drift->evaluate(b)).dot(a - b);
      if (lhs > -c.c4f * (a - b).squaredNorm() + 1e-9) ++violations;
      const Vec x = random_point(normal, drift->dim(), 50.0);
      if (drift->evaluate(x).norm() > c.c_growth * std::pow(1.0 + x.norm(), c.n_growth) + 1e-9) ++violations;
    }
    INFO(drift->name());
    CHECK(violations == 0);
  }
}

TEST_CASE("jacobians agree with central differences") {
  NormalSource normal(3);
  for (const auto& drift : all_drifts()) {
    for (int i = 0; i < 200; ++i) {
      const Vec x = random_point(normal, drift->dim(), 3.0);
      const Mat j = drift->jacobian(x);
      const double eps = 1e-6;
      for (int c = 0; c < drift->dim(); ++c) {
        Vec e = Vec::Zero(drift->dim());
        e[c] = eps;
        const Vec fd = (drift->evaluate(x + e) - drift->evaluate(x - e)) / (2.0 * eps);
        CHECK((fd - j.col(c)).norm() < 1e-6 * (1.0 + j.norm()));
      }
    }
  }
}

TEST_CASE("example drift pieces and their C2 joins") {
  const RadialPitchforkDrift f(2, 1.2, 1.8);
  Vec x(2);
  x << 0.3, -0.4;
  CHECK((f.evaluate(x) - (x - x * x.squaredNorm())).norm() < 1e-15);
  x << 2.0, 1.0;
  CHECK((f.evaluate(x) + x).norm() < 1e-15);

  for (double r : {1.2, 1.8}) {
    const double h = 1e-7;
    CHECK(f.profile(r - h) == doctest::Approx(f.profile(r + h)).epsilon(1e-6));
    CHECK(f.profile_slope(r - h) == doctest::Approx(f.profile_slope(r + h)).epsilon(1e-5));
    const double curv_left = (f.profile_slope(r - h) - f.profile_slope(r - 2e-4)) / (2e-4 - h);
    const double curv_right = (f.profile_slope(r + 2e-4) - f.profile_slope(r + h)) / (2e-4 - h);
    CHECK(curv_left == doctest::Approx(curv_right).epsilon(2e-3).scale(1.0));
  }
  // Blend coefficients in s = (r - 1.2) / 0.6, solved independently.
  const double expected[] = {-0.528, -1.992, -1.296, 5.52, -4.944, 1.44};
  for (int k = 0; k <= 10; ++k) {
    const double s = k / 10.0;
    double v = 0.0;
    for (int i = 5; i >= 0; --i) v = v * s + expected[i];
    CHECK(f.profile(1.2 + 0.6 * s) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("example drift constants") {
  const auto f = make_drift(DriftSpec{});
  const DriftConstants& c = f->constants();
  CHECK(c.c2f == 0.5);
  CHECK(c.r_mono == 1.8);
  CHECK(c.n_growth == 1);
  CHECK(c.c3f == doctest::Approx(1.0).epsilon(0.01));
  CHECK(f->c_bound() == doctest::Approx(4.74).epsilon(0.01));
  CHECK(f->sup_norm_on_ball(1.0) == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-6));
  CHECK(f->sup_norm_on_ball(10.0) == doctest::Approx(10.0));
}

TEST_CASE("registry") {
  CHECK(registered_drifts().size() == 4);
  CHECK_THROWS_AS(make_drift(DriftSpec{"nope", 2, {}, {}}), ContractViolation);
  CHECK_THROWS_AS(make_drift(DriftSpec{"linear", 2, {}, {1.0, 2.0}}), ContractViolation);
  CHECK_THROWS_AS(make_drift(DriftSpec{"ou", 9, {}, {}}), ContractViolation);
  const auto lin = make_drift(DriftSpec{"linear", 2, {{"a", 3.0}}, {}});
  Vec x(2);
  x << 1.0, 2.0;
  CHECK((lin->evaluate(x) + 3.0 * x).norm() < 1e-15);
  CHECK_FALSE(make_drift(DriftSpec{"linear", 2, {}, {0.5, 0.0, 0.0, -1.0}})->constants().certified);
}

TEST_CASE("default sup norm probe bounds sampled values") {
  const auto lin = make_drift(DriftSpec{"linear", 2, {}, {-1.0, 2.0, 0.0, -1.0}});
  NormalSource normal(4);
  const double probe = lin->DriftModel::sup_norm_on_ball(2.0);
  const double exact = lin->sup_norm_on_ball(2.0);
  CHECK(probe <= exact + 1e-12);
  CHECK(probe > 0.95 * exact);
}
