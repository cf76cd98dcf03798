#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracle_values.hpp"
#include "soliton/evolution.hpp"
#include "soliton/functionals.hpp"

using namespace soliton;
using testing_support::kdv_soliton;
using testing_support::max_abs_diff;
using testing_support::mkdv_soliton;

namespace {

GridPtr default_grid() { return make_grid(1024, 80.0); }

// W = -s^3: u_t + u_xxx + 6 u u_x = 0.
NonlinearityModel kdv_model() { return NonlinearityModel::polynomial({0.0, -1.0}); }

}  // namespace

TEST(Evolution, ZeroStaysZero) {
  const auto g = default_grid();
  const EvolutionTrace t = evolve(Field(g), gauge_shift(NonlinearityModel::mkdv(1)).model, 1e-2, 1.0, {});
  EXPECT_EQ(max_abs_diff(*t.final_state, Field(g)), 0.0);
  EXPECT_EQ(t.energy_drift, 0.0);
  EXPECT_EQ(t.charge_drift, 0.0);
}

TEST(Evolution, LinearFlowIsExact) {
  const auto g = default_grid();
  const double e0 = 0.75, T = 3.0;
  const double k1 = g->wavenumber(3);
  const Field u0 = Field::sample(g, [&](double x) { return std::sin(k1 * x); });
  const EvolutionTrace t = evolve(u0, NonlinearityModel::polynomial({e0}), 1e-2, T, {});
  const double omega = k1 * k1 * k1 + 2 * e0 * k1;
  const Field exact = Field::sample(g, [&](double x) { return std::sin(k1 * x + omega * T); });
  EXPECT_LT(max_abs_diff(*t.final_state, exact), 1e-10);
}

TEST(Evolution, TimeReversalOfLinearFlow) {
  const auto g = default_grid();
  const auto m = NonlinearityModel::polynomial({1.0});
  const Field u0 = mkdv_soliton(g, 1, 1.0, 30.0);
  const EvolutionTrace fwd = evolve(u0, m, 1e-2, 5.0, {});
  EvolutionOptions back;
  back.reverse_linear = true;
  const EvolutionTrace rev = evolve(*fwd.final_state, m, 1e-2, 5.0, back);
  EXPECT_GT(max_abs_diff(*fwd.final_state, u0), 1e-2);
  EXPECT_LT(max_abs_diff(*rev.final_state, u0), 1e-10);
}

TEST(Evolution, KdvSolitonTravels) {
  const auto g = default_grid();
  const Field u0 = kdv_soliton(g, 1.0, 40.0);
  EvolutionOptions opts;
  opts.reference = u0;
  const EvolutionTrace t = evolve(u0, kdv_model(), 1e-3, 10.0, opts);
  ASSERT_EQ(t.times.size(), 101u);
  EXPECT_EQ(t.energy_series.size(), t.times.size());
  EXPECT_EQ(t.orbital_distance.size(), t.times.size());
  EXPECT_LT(t.orbital_distance.back(), 1e-6);
  // tau = -c T modulo L, wrapped to [-L/2, L/2).
  EXPECT_NEAR(t.best_tau.back(), -10.0, 1e-4);
  EXPECT_LT(t.energy_drift, 1e-8);
  EXPECT_LT(t.charge_drift, 1e-8);
}

TEST(Evolution, FourthOrderConvergence) {
  const auto g = default_grid();
  const Field u0 = kdv_soliton(g, 1.0, 40.0);
  EvolutionOptions opts;
  opts.sample_stride = 1.0;
  const double dt = 0.05;
  const Field ref = *evolve(u0, kdv_model(), dt / 16, 1.0, opts).final_state;
  const double e1 = h1_distance(*evolve(u0, kdv_model(), dt, 1.0, opts).final_state, ref);
  const double e2 = h1_distance(*evolve(u0, kdv_model(), dt / 2, 1.0, opts).final_state, ref);
  EXPECT_GE(std::log2(e1 / e2), 3.7);
}

TEST(Evolution, DriftIsComputedFromSeries) {
  const auto g = default_grid();
  const auto m = gauge_shift(NonlinearityModel::mkdv(2)).model;
  const Field u0 = Field::sample(g, [](double x) { return std::exp(-(x - 40) * (x - 40) / 4); });
  const EvolutionTrace t = evolve(u0, m, 1e-2, 2.0, {});
  double worst = 0.0;
  for (double e : t.energy_series) worst = std::max(worst, std::abs(e - t.energy_series.front()));
  EXPECT_EQ(t.energy_drift, worst / std::abs(t.energy_series.front()));
  EXPECT_TRUE(t.well_posedness_guaranteed);
}

TEST(Evolution, Snapshots) {
  const auto g = default_grid();
  EvolutionOptions opts;
  opts.snapshot_every = 5;
  const EvolutionTrace t = evolve(mkdv_soliton(g, 1, 1.0, 40.0), NonlinearityModel::mkdv(1), 1e-2, 1.0, opts);
  ASSERT_EQ(t.snapshots.size(), 3u);
  EXPECT_DOUBLE_EQ(t.snapshot_times[1], 0.5);
}

TEST(Evolution, ValidatesArguments) {
  const Field u0(default_grid());
  const auto m = NonlinearityModel::mkdv(1);
  EXPECT_THROW(evolve(u0, m, 0.0, 1.0, {}), DomainError);
  EXPECT_THROW(evolve(u0, m, 0.3, 1.0, {}), DomainError);
  EXPECT_THROW(evolve(u0, m, 0.1, -1.0, {}), DomainError);
  EvolutionOptions opts;
  opts.reference = Field(make_grid(512, 80.0));
  EXPECT_THROW(evolve(u0, m, 0.1, 1.0, opts), DomainError);
}

TEST(Evolution, BlowUpCarriesPartialTrace) {
  const auto g = default_grid();
  const auto m = gauge_shift(NonlinearityModel::abs_power(5)).model;
  const Field u0 = Field::sample(g, [](double x) { return 5.0 * std::exp(-(x - 40) * (x - 40)); });
  try {
    evolve(u0, m, 1e-3, 1.0, {});
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_NE(std::string(e.what()).find("blow-up detected at t"), std::string::npos);
    EXPECT_GT(e.time(), 0.0);
    EXPECT_FALSE(e.partial().times.empty());
    EXPECT_FALSE(e.partial().well_posedness_guaranteed);
  }
}

TEST(MeasureSpeed, UnwrapsPeriodicOffsets) {
  std::vector<double> times, taus;
  const double L = 10.0, c = 3.0;
  for (int i = 0; i <= 50; ++i) {
    const double t = 0.1 * i;
    times.push_back(t);
    taus.push_back(std::remainder(-c * t + 1.0, L));
  }
  EXPECT_NEAR(measure_speed(times, taus, L), c, 1e-12);
  EXPECT_THROW(measure_speed({0.0}, {0.0}, L), DomainError);
}

TEST(TravelTest, GroundStateTravelsAtItsSpeed) {
  const auto g = default_grid();
  const auto m = gauge_shift(NonlinearityModel::mkdv(1)).model;
  const GroundState gs = minimize_energy_at_charge(m, g, oracle::kMkdv1ChargeC1, {});
  const TravelReport r = travel_test(gs, m, 10.0, {});
  EXPECT_LT(r.relative_error(), 1e-3);
  EXPECT_LT(r.max_orbital_distance, 1e-5);
}

TEST(TravelTest, FramesDifferByShiftSpeed) {
  const auto g = default_grid();
  const auto plain = NonlinearityModel::mkdv(1);
  const auto shifted = gauge_shift(plain).model;
  const Field u = mkdv_soliton(g, 1, 1.0, 40.0);
  TravelOptions opts;
  opts.dt = 2e-3;
  const TravelReport a = travel_test(u, 1.0, plain, 4.0, opts);
  const TravelReport b = travel_test(u, 1.0 - shifted.shift_speed(), shifted, 4.0, opts);
  EXPECT_NEAR(a.measured_speed - b.measured_speed, shifted.shift_speed(), 1e-6);
}

TEST(TravelTest, ZeroHorizonHasNoSpeed) {
  const auto g = default_grid();
  EXPECT_THROW(travel_test(mkdv_soliton(g, 1, 1.0, 40.0), 1.0, NonlinearityModel::mkdv(1), 0.0, {}),
               DomainError);
}
