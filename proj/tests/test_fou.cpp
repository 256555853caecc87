#include "doctest.h"

#include <cmath>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>

#include "fracsync/fbm.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/integrator.hpp"
#include "support.hpp"

using namespace fracsync;

TEST_CASE("zero driver gives a zero process") {
  const auto sigma = DiffusionMatrix::scaled_identity(2.0, 2);
  const NoisePath zero = NoisePath::zeros(Grid::past(0.01, 500), 2, NoiseKind::fractional, 0.3);
  const FouProcess z = fou_evaluate(sigma, zero, 5.0);
  for (double v : z.values) CHECK(v == 0.0);
  CHECK(z.truncation_proxy == doctest::Approx(std::exp(-5.0) * std::sqrt(6.0)));
}

TEST_CASE("cell recursion solves the OU equation for a linear driver") {
  // Driver B(t) = c t: Z solves Z' = -Z + sigma c with Z(-T) = 0.
  const double dt = 0.01, c = 1.5, T = 4.0;
  const Grid g = Grid::past(dt, 400);
  std::vector<double> values(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) values[k] = c * g.time(k);
  const NoisePath line(g, 1, NoiseKind::fractional, 0.7, values);
  const FouProcess z = fou_evaluate(DiffusionMatrix::scaled_identity(2.0, 1), line, T);
  for (std::size_t k = 0; k < g.size(); k += 50) {
    const double t = g.time(k);
    CHECK(z.at(k)[0] == doctest::Approx(2.0 * c * (1.0 - std::exp(-(t + T)))).epsilon(1e-12));
  }
}

TEST_CASE("stationary variance of the OU process") {
  // H = 1/2: Var = sigma^2 / 2. Other H: Var = sigma^2 H Gamma(2H).
  for (auto [h, kappa] : {std::tuple{0.5, 1.0}, std::tuple{0.7, 0.8}}) {
    const auto sigma = DiffusionMatrix::scaled_identity(kappa, 2);
    std::vector<double> sq;
    for (int s = 0; s < 4096; ++s) {
      const NoisePath w = sample_two_sided_fbm(0.01, -12.0, 0.0, h, 2, seed_stream(7, static_cast<std::uint64_t>(s)));
      const FouProcess z = fou_evaluate(sigma, w, 12.0);
      const Vec last = z.at(z.grid.size() - 1);
      sq.push_back(0.5 * last.squaredNorm());
    }
    const double target = kappa * kappa * h * boost::math::tgamma(2.0 * h);
    const auto stats = testing::mean_se(sq);
    INFO("h = " << h);
    CHECK(std::abs(stats.mean - target) < 0.05 * target);
  }
}

TEST_CASE("absorbing radius") {
  const auto f = make_drift(DriftSpec{});
  const auto sigma = DiffusionMatrix::scaled_identity(1.0, 2);
  const NoisePath zero = NoisePath::zeros(Grid::past(0.01, 3000), 2, NoiseKind::fractional, 0.6);
  const double c2 = f->constants().c2f;
  CHECK(absorbing_radius(*f, fou_evaluate(sigma, zero, 30.0)) ==
        doctest::Approx(std::sqrt(absorbing_constant(*f) / c2)).epsilon(1e-12));

  const NoisePath w = sample_two_sided_fbm(0.01, -60.0, 0.0, 0.6, 2, 3);
  const FouProcess z1 = fou_evaluate(sigma, w, 30.0);
  const FouProcess z2 = fou_evaluate(DiffusionMatrix::scaled_identity(2.0, 2), w, 30.0);
  CHECK(absorbing_radius(*f, z2) > absorbing_radius(*f, z1));

  const double short_back = absorbing_radius(*f, fou_evaluate(sigma, w, 30.0));
  const double long_back = absorbing_radius(*f, fou_evaluate(sigma, w, 60.0));
  CHECK(std::abs(long_back - short_back) < 0.01 * long_back);
}
