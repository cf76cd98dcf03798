#include "soliton/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "soliton/functionals.hpp"
#include "soliton/parallel.hpp"

namespace soliton {

std::string_view to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::Scale: return "scale";
    case PerturbationKind::Bump: return "bump";
    case PerturbationKind::Noise: return "noise";
  }
  return "unknown";
}

Field perturbation_shape(const GridPtr& grid, const PerturbationSpec& spec) {
  const Grid& g = *grid;
  switch (spec.kind) {
    case PerturbationKind::Scale:
      throw DomainError("scale perturbations have no additive shape");
    case PerturbationKind::Bump: {
      if (!(spec.width > 0.0)) throw DomainError("bump width must be positive");
      const double xb = 0.5 * g.length() + spec.offset;
      return Field::sample(grid, [&](double x) {
        // Nearest periodic image of the bump centre.
        double d = std::remainder(x - xb, g.length());
        return std::exp(-(d / spec.width) * (d / spec.width));
      });
    }
    case PerturbationKind::Noise: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Spectrum s(g.modes(), 0.0);
      const double kcut = 0.25 * g.k_max();
      for (std::size_t j = 1; j < g.nyquist() && g.wavenumber(j) <= kcut; ++j) {
        const double amp = unit(rng);
        const double phase = 2.0 * std::numbers::pi * unit(rng);
        s[j] = std::polar(amp, phase);
      }
      std::vector<double> v = inverse(g, s);
      double peak = 0.0;
      for (double x : v) peak = std::max(peak, std::abs(x));
      for (double& x : v) x /= peak;
      return Field(grid, std::move(v));
    }
  }
  throw DomainError("unknown perturbation kind");
}

Field perturb(const Field& u, const PerturbationSpec& spec) {
  if (!(spec.epsilon >= 0.0) || !std::isfinite(spec.epsilon))
    throw DomainError("perturbation size must be >= 0");
  if (spec.epsilon == 0.0) return u;
  if (spec.kind == PerturbationKind::Scale) return (1.0 + spec.epsilon) * u;
  Field out = u;
  out += spec.epsilon * perturbation_shape(u.grid_ptr(), spec);
  return out;
}

bool StabilityReport::all_stable() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return !r.error && r.stable; });
}

StabilityReport stability_experiment(const GroundState& gs, const NonlinearityModel& model,
                                     const std::vector<PerturbationSpec>& specs, double t_end,
                                     const StabilityOptions& opts) {
  if (!gs.converged) throw DomainError("stability experiment needs a converged ground state");
  if (!(opts.acceptance_ratio > 0.0)) throw DomainError("acceptance ratio must be positive");
  StabilityReport report;
  report.acceptance_ratio = opts.acceptance_ratio;
  report.well_posedness_guaranteed = well_posedness_guaranteed(model);
  report.rows.resize(specs.size());

  parallel_for(specs.size(), opts.jobs, [&](std::size_t i) {
    StabilityRow& row = report.rows[i];
    row.spec = specs[i];
    try {
      const Field start = perturb(gs.profile, specs[i]);
      EvolutionOptions eo;
      eo.sample_stride = opts.evolution.sample_stride;
      eo.dealias = opts.evolution.dealias;
      eo.reference = gs.profile;
      const EvolutionTrace trace = evolve(start, model, opts.evolution.dt, t_end, eo);
      row.times = trace.times;
      row.distances = trace.orbital_distance;
      row.initial_distance = trace.orbital_distance.front();
      row.max_distance = *std::max_element(row.distances.begin(), row.distances.end());
      // An unperturbed row only accumulates discretization drift.
      const double floor = row.initial_distance > 0.0 ? 0.0 : 1e-6;
      row.stable = row.max_distance <= opts.acceptance_ratio * row.initial_distance + floor;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });
  return report;
}

SubadditivityReport subadditivity_check(const NonlinearityModel& model, const GridPtr& grid,
                                        double c1, double c2, const SubadditivityOptions& opts) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("charges must be positive");
  const std::array<double, 3> charges = {c1, c2, c1 + c2};
  std::array<std::optional<GroundState>, 3> states;
  parallel_for(3, opts.jobs, [&](std::size_t i) {
    states[i] = minimize_energy_at_charge(model, grid, charges[i], opts.minimizer);
  });
  SubadditivityReport r;
  r.c1 = c1;
  r.c2 = c2;
  r.e1 = states[0]->energy;
  r.e2 = states[1]->energy;
  r.e12 = states[2]->energy;
  r.gap = r.e1 + r.e2 - r.e12;
  r.strict = r.e12 < r.e1 + r.e2 - opts.margin;
  r.converged = states[0]->converged && states[1]->converged && states[2]->converged;
  return r;
}

double hylomorphy_ratio(const GroundState& gs) {
  if (!(gs.charge_target > 0.0)) throw DomainError("hylomorphy ratio needs a positive charge");
  return gs.energy / gs.charge_target;
}

}  // namespace soliton
