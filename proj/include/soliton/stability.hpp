#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soliton/evolution.hpp"
#include "soliton/groundstate.hpp"

namespace soliton {

enum class PerturbationKind { Scale, Bump, Noise };

std::string_view to_string(PerturbationKind kind);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::Scale;
  double epsilon = 0.0;
  double offset = 0.0;  // Bump: centre at L/2 + offset
  double width = 1.0;   // Bump: Gaussian exp(-((x - x_b)/width)^2)
  std::uint64_t seed = 0;  // Noise
};

/// The unit-amplitude shape added for Bump and Noise perturbations. Noise is
/// a seeded random field restricted to |k| <= k_max/4 and scaled to max |g| = 1.
Field perturbation_shape(const GridPtr& grid, const PerturbationSpec& spec);

/// Scale: (1 + eps) u.  Bump/Noise: u + eps * shape.
Field perturb(const Field& u, const PerturbationSpec& spec);

struct StabilityOptions {
  TravelOptions evolution;  // dt, sample stride, dealiasing
  double acceptance_ratio = 10.0;
  std::size_t jobs = 1;
};

struct StabilityRow {
  PerturbationSpec spec;
  double initial_distance = 0.0;
  double max_distance = 0.0;
  bool stable = false;  // max <= ratio * initial (or tiny absolute drift when initial == 0)
  std::vector<double> times;
  std::vector<double> distances;
  std::optional<std::string> error;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double acceptance_ratio = 10.0;
  bool well_posedness_guaranteed = true;

  bool all_stable() const;
};

/// Perturbs the ground state, evolves each perturbation to t_end and tracks
/// the H1 distance to the ground state's translation orbit.
StabilityReport stability_experiment(const GroundState& gs, const NonlinearityModel& model,
                                     const std::vector<PerturbationSpec>& specs, double t_end,
                                     const StabilityOptions& opts = {});

struct SubadditivityOptions {
  MinimizerOptions minimizer;
  double margin = 0.0;
  std::size_t jobs = 1;
};

struct SubadditivityReport {
  double c1 = 0.0, c2 = 0.0;
  double e1 = 0.0, e2 = 0.0, e12 = 0.0;
  double gap = 0.0;  // e1 + e2 - e12
  bool strict = false;
  bool converged = false;
};

/// e(c1 + c2) < e(c1) + e(c2) - margin, with e the constrained minimum.
SubadditivityReport subadditivity_check(const NonlinearityModel& model, const GridPtr& grid,
                                        double c1, double c2,
                                        const SubadditivityOptions& opts = {});

/// e0 / c0.
double hylomorphy_ratio(const GroundState& gs);

}  // namespace soliton
