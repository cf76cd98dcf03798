#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "soliton/functionals.hpp"
#include "soliton/spectral.hpp"

using namespace soliton;
using testing_support::max_abs_diff;
using testing_support::random_smooth;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr default_grid() { return make_grid(1024, 80.0); }

double norm2(const Spectrum& s) {
  double sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) sum += (j == 0 ? 1.0 : 2.0) * std::norm(s[j]);
  return sum;
}

}  // namespace

TEST(Grid, Geometry) {
  const Grid g(256, 10.0);
  EXPECT_NEAR(g.dx() * static_cast<double>(g.n()), 10.0, 1e-14);
  EXPECT_EQ(g.modes(), 129u);
  EXPECT_DOUBLE_EQ(g.wavenumber(1), 2 * kPi / 10.0);
  const auto full = g.full_wavenumbers();
  ASSERT_EQ(full.size(), 256u);
  for (std::size_t j = 1; j < 128; ++j) EXPECT_DOUBLE_EQ(full[j], -full[256 - j]);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid(100, 1.0), DomainError);
  EXPECT_THROW(Grid(32, 1.0), DomainError);
  EXPECT_THROW(Grid(128, 0.0), DomainError);
  EXPECT_THROW(Grid(128, -1.0), DomainError);
}

TEST(Field, RejectsInvalidValues) {
  const auto g = make_grid(64, 1.0);
  EXPECT_THROW(Field(g, std::vector<double>(63, 0.0)), DomainError);
  std::vector<double> v(64, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(Field(g, v), DomainError);
  EXPECT_THROW(Field(g) + Field(make_grid(64, 2.0)), DomainError);
}

TEST(Spectral, DerivativeOfSine) {
  const auto g = default_grid();
  const double k = 2 * kPi / 80.0;
  const Field f = Field::sample(g, [&](double x) { return std::sin(k * x); });
  const Field d1 = derivative(f, 1);
  const Field d3 = derivative(f, 3);
  for (std::size_t j = 0; j < f.size(); ++j) {
    EXPECT_NEAR(d1[j], k * std::cos(k * g->x(j)), 1e-12);
    // Rounding in the transform is amplified by k_max^3 ~ 6e4.
    EXPECT_NEAR(d3[j], -k * k * k * std::cos(k * g->x(j)), 1e-10);
  }
}

TEST(Spectral, DerivativeOfConstantVanishes) {
  const auto g = default_grid();
  const Field one = Field::sample(g, [](double) { return 1.0; });
  for (int order : {1, 2, 3}) EXPECT_LT(max_abs_diff(derivative(one, order), Field(g)), 1e-14);
}

TEST(Spectral, RejectsBadDerivativeOrder) {
  const Field f(default_grid());
  EXPECT_THROW(derivative(f, 0), DomainError);
  EXPECT_THROW(derivative(f, 4), DomainError);
}

TEST(Spectral, RoundTripIsIdentity) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const auto g = default_grid();
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> v(g->n());
    for (double& x : v) x = normal(rng);
    const auto back = inverse(*g, forward(*g, v));
    double err = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      err += (back[j] - v[j]) * (back[j] - v[j]);
      ref += v[j] * v[j];
    }
    EXPECT_LT(std::sqrt(err / ref), 1e-13);
  }
}

TEST(Spectral, DerivativesCompose) {
  std::mt19937_64 rng(5);
  const auto g = default_grid();
  for (int trial = 0; trial < 10; ++trial) {
    const Field f = random_smooth(g, rng, 12);
    const Field twice = derivative(derivative(f, 1), 1);
    const Field direct = derivative(f, 2);
    double peak = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) peak = std::max(peak, std::abs(direct[j]));
    EXPECT_LT(max_abs_diff(twice, direct) / peak, 1e-10);
  }
}

TEST(Spectral, TranslationExamples) {
  const auto g = default_grid();
  const double k = 2 * kPi / 80.0;
  const Field f = Field::sample(g, [&](double x) { return std::sin(k * x); });
  EXPECT_LT(max_abs_diff(translate(f, 0.0), f), 1e-15);
  const Field shifted = translate(f, 20.0);
  const Field expected = Field::sample(g, [&](double x) { return -std::cos(k * x); });
  EXPECT_LT(max_abs_diff(shifted, expected), 1e-13);
}

TEST(Spectral, TranslationComposesAndPreservesCharge) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  const auto g = default_grid();
  for (int trial = 0; trial < 10; ++trial) {
    const Field f = random_smooth(g, rng, 20);
    const double a = shift(rng), b = shift(rng);
    EXPECT_LT(max_abs_diff(translate(translate(f, a), b), translate(f, a + b)), 1e-12);
    EXPECT_NEAR(charge(translate(f, a)), charge(f), 1e-12 * charge(f));
  }
}

TEST(Spectral, DealiasExamples) {
  const auto g = make_grid(128, 10.0);
  Spectrum low(g->modes(), 0.0);
  for (std::size_t j = 0; j <= g->n() / 3; ++j) low[j] = {1.0 / (1.0 + j), 0.5};
  EXPECT_EQ(dealias(*g, low), low);

  Spectrum nyq(g->modes(), 0.0);
  nyq[g->nyquist()] = 1.0;
  for (const auto& c : dealias(*g, nyq)) EXPECT_EQ(c, std::complex<double>(0.0));

  std::mt19937_64 rng(3);
  const Field f = random_smooth(g, rng, 60);
  const Spectrum s = forward(f);
  EXPECT_LE(norm2(dealias(*g, s)), norm2(s));
}

TEST(Spectral, BandLimitKeepsLowModes) {
  const auto g = make_grid(128, 10.0);
  Spectrum s(g->modes(), 1.0);
  const Spectrum out = band_limit(*g, s, 0.25);
  for (std::size_t j = 0; j < s.size(); ++j)
    EXPECT_EQ(out[j], g->wavenumber(j) <= 0.25 * g->k_max() ? s[j] : std::complex<double>(0.0));
}

TEST(Spectral, CsvAndSnapshotRoundTrip) {
  std::mt19937_64 rng(13);
  const auto g = make_grid(64, 7.5);
  const Field f = random_smooth(g, rng, 8);
  const auto dir = std::filesystem::temp_directory_path() / "soliton_spectral_io";
  std::filesystem::create_directories(dir);

  write_csv(f, dir / "f.csv");
  const Field c = read_csv(dir / "f.csv");
  EXPECT_TRUE(c.grid() == *g);
  EXPECT_EQ(max_abs_diff(c, f), 0.0);

  write_snapshot(f, 1.25, dir / "f.bin");
  const Snapshot s = read_snapshot(dir / "f.bin");
  EXPECT_EQ(s.time, 1.25);
  EXPECT_TRUE(s.field.grid() == *g);
  EXPECT_EQ(max_abs_diff(s.field, f), 0.0);

  EXPECT_THROW(read_snapshot(dir / "missing.bin"), IoError);
  std::filesystem::remove_all(dir);
}
