#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "oracle_values.hpp"
#include "soliton/functionals.hpp"
#include "soliton/model.hpp"

using namespace soliton;
using testing_support::mkdv_soliton;
using testing_support::random_smooth;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr default_grid() { return make_grid(1024, 80.0); }

Field gaussian(const GridPtr& g, double amp, double width) {
  const double c = 0.5 * g->length();
  return Field::sample(g, [&](double x) { return amp * std::exp(-(x - c) * (x - c) / (width * width)); });
}

}  // namespace

TEST(Functionals, ZeroField) {
  const Field zero(default_grid());
  const auto m = NonlinearityModel::mkdv(1);
  EXPECT_EQ(energy(zero, m), 0.0);
  EXPECT_EQ(charge(zero), 0.0);
  EXPECT_EQ(eigen_residual(zero, m, 2.5), 0.0);
  EXPECT_FALSE(observables(zero, m).hylenic_ratio.has_value());
}

TEST(Functionals, SineIntegrals) {
  const auto g = make_grid(1024, 2 * kPi);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  EXPECT_NEAR(energy(s, NonlinearityModel::polynomial({1.0})), 1.5 * kPi, 1e-12);
  EXPECT_NEAR(charge(s), 0.5 * kPi, 1e-13);
  EXPECT_NEAR(h1_distance(Field(g), s), std::sqrt(2 * kPi), 1e-13);
  EXPECT_EQ(h1_distance(s, s), 0.0);
}

TEST(Functionals, SolitonEnergyMatchesQuadrature) {
  const Field u = mkdv_soliton(default_grid(), 1, 1.0, 40.0);
  EXPECT_NEAR(energy(u, NonlinearityModel::mkdv(1)), oracle::kMkdv1EnergyC1,
              1e-9 * std::abs(oracle::kMkdv1EnergyC1));
  EXPECT_NEAR(charge(u), oracle::kMkdv1ChargeC1, 1e-9 * oracle::kMkdv1ChargeC1);
}

TEST(Functionals, ObservablesRatio) {
  const Field u = mkdv_soliton(default_grid(), 2, 1.0, 40.0);
  const auto m = NonlinearityModel::mkdv(2);
  const Observables o = observables(u, m);
  ASSERT_TRUE(o.hylenic_ratio.has_value());
  EXPECT_NEAR(*o.hylenic_ratio * o.charge, o.energy, 1e-13 * std::abs(o.energy));
  EXPECT_LT(*o.hylenic_ratio, 0.0);
}

TEST(Functionals, EigenResidualOfClosedForms) {
  const auto g = default_grid();
  for (int k : {1, 2, 3})
    for (double c : {0.5, 1.0, 2.0}) {
      const Field u = mkdv_soliton(g, k, c, 40.0);
      EXPECT_LT(eigen_residual(u, NonlinearityModel::mkdv(k), c), 1e-8) << "k=" << k << " c=" << c;
    }
}

TEST(Functionals, EigenResidualOfSine) {
  const auto g = default_grid();
  const Field s = Field::sample(g, [](double x) { return std::sin(2 * kPi * x / 80.0); });
  EXPECT_NEAR(eigen_residual(s, NonlinearityModel::mkdv(1), 0.0), oracle::kSineResidualL80, 1e-12);
}

TEST(Functionals, TranslationAndScalingInvariance) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> shift(-40.0, 40.0);
  const auto g = default_grid();
  const auto m = gauge_shift(NonlinearityModel::mkdv(2)).model;
  for (int trial = 0; trial < 10; ++trial) {
    const Field u = random_smooth(g, rng, 10);
    const double e = energy(u, m);
    EXPECT_NEAR(energy(translate(u, shift(rng)), m), e, 1e-10 * (1 + std::abs(e)));
    EXPECT_NEAR(charge(2.5 * u), 6.25 * charge(u), 1e-14 * 6.25 * charge(u));
  }
}

TEST(Functionals, H1TriangleInequality) {
  std::mt19937_64 rng(17);
  const auto g = default_grid();
  for (int trial = 0; trial < 20; ++trial) {
    const Field a = random_smooth(g, rng), b = random_smooth(g, rng), c = random_smooth(g, rng);
    EXPECT_LE(h1_distance(a, c), h1_distance(a, b) + h1_distance(b, c) + 1e-12);
  }
  EXPECT_THROW(h1_distance(Field(g), Field(make_grid(1024, 40.0))), DomainError);
}

TEST(Functionals, VariationalConsistency) {
  std::mt19937_64 rng(99);
  const auto g = default_grid();
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = gauge_shift(NonlinearityModel::mkdv(1 + trial % 3)).model;
    Field u = random_smooth(g, rng, 8);
    u += gaussian(g, 1.5, 3.0);
    Field h = random_smooth(g, rng, 8);
    h += gaussian(g, 1.0, 2.0);
    const double exact = inner(energy_gradient(u, m), h);
    double err[2];
    const double eps[2] = {1e-3, 1e-4};
    for (int i = 0; i < 2; ++i) {
      const double fd = (energy(u + eps[i] * h, m) - energy(u - eps[i] * h, m)) / (2 * eps[i]);
      err[i] = std::abs(fd - exact);
    }
    EXPECT_GT(err[0] / err[1], 50.0) << "trial " << trial;
    EXPECT_LT(err[1], 1e-6 * (1 + std::abs(exact)));
  }
}

TEST(OrbitalDistance, Examples) {
  const auto g = default_grid();
  const Field v = mkdv_soliton(g, 1, 1.0, 40.0);
  const OrbitMatch self = orbital_distance(v, v);
  EXPECT_LT(self.distance, 1e-12);
  EXPECT_LT(std::abs(self.tau), 1e-10);

  const OrbitMatch moved = orbital_distance(translate(v, 3.7), v);
  EXPECT_LE(moved.distance, 1e-10);
  EXPECT_NEAR(moved.tau, -3.7, 1e-8);

  const Field zero(g);
  EXPECT_NEAR(orbital_distance(zero, v).distance, h1_distance(zero, v), 1e-12);
}

TEST(OrbitalDistance, WrapsAroundTheBox) {
  const auto g = default_grid();
  const Field v = mkdv_soliton(g, 2, 1.0, 40.0);
  const OrbitMatch m = orbital_distance(translate(v, 75.0), v);
  EXPECT_LT(m.distance, 1e-10);
  EXPECT_NEAR(m.tau, 5.0, 1e-8);
}

TEST(OrbitalDistance, NeverExceedsH1Distance) {
  std::mt19937_64 rng(4);
  const auto g = default_grid();
  for (int trial = 0; trial < 20; ++trial) {
    const Field a = random_smooth(g, rng), b = random_smooth(g, rng);
    EXPECT_LE(orbital_distance(a, b).distance, h1_distance(a, b) + 1e-12);
  }
}
