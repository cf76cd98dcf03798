#pragma once

#include <optional>
#include <vector>

#include "soliton/groundstate.hpp"
#include "soliton/model.hpp"
#include "soliton/spectral.hpp"

namespace soliton {

struct EvolutionOptions {
  double sample_stride = 0.1;
  bool dealias = true;
  /// Store a snapshot every this many samples (0: none).
  std::size_t snapshot_every = 0;
  /// When set, the orbital distance to this field is recorded at each sample.
  std::optional<Field> reference;
  /// Run the linear flow backwards (negated dispersion symbol).
  bool reverse_linear = false;
  /// max |u| above this is reported as blow-up.
  double blowup_amplitude = 1e6;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> energy_series;
  std::vector<double> charge_series;
  std::vector<double> orbital_distance;  // empty without a reference
  std::vector<double> best_tau;
  std::vector<Field> snapshots;
  std::vector<double> snapshot_times;
  std::optional<Field> final_state;
  double energy_drift = 0.0;  // max |E(t) - E(0)| / |E(0)|
  double charge_drift = 0.0;
  bool well_posedness_guaranteed = true;

  double drift() const { return std::max(energy_drift, charge_drift); }
};

class BlowUpError : public NumericalError {
 public:
  BlowUpError(double time, EvolutionTrace partial);
  double time() const { return time_; }
  const EvolutionTrace& partial() const { return partial_; }

 private:
  double time_;
  EvolutionTrace partial_;
};

/// Fourth-order exponential time differencing for
///   u_t = -u_xxx + 2 E0 u_x + (N'(u))_x.
/// The linear symbol i(k^3 + 2 E0 k) is integrated exactly; the remaining
/// nonlinear flux is evaluated pseudospectrally with 2/3-rule dealiasing.
class EtdStepper {
 public:
  EtdStepper(const GridPtr& grid, const NonlinearityModel& model, double dt, bool dealias = true,
             bool reverse_linear = false);

  void step(Spectrum& v) const;
  double dt() const { return dt_; }

 private:
  Spectrum nonlinear(const Spectrum& v) const;

  GridPtr grid_;
  NonlinearityModel model_;
  double dt_;
  bool dealias_;
  Spectrum e_, e2_, q_, f1_, f2_, f3_;
};

EvolutionTrace evolve(const Field& u0, const NonlinearityModel& model, double dt, double t_end,
                      const EvolutionOptions& opts = {});

/// Least-squares speed from best_tau samples: tau is unwrapped against the
/// period by nearest continuation and speed = -slope. Throws DomainError with
/// fewer than two distinct sample times.
double measure_speed(const std::vector<double>& times, const std::vector<double>& taus,
                     double length, std::vector<double>* unwrapped = nullptr);

struct TravelOptions {
  double dt = 1e-3;
  double sample_stride = 0.1;
  bool dealias = true;
};

struct TravelReport {
  double max_orbital_distance = 0.0;
  double measured_speed = 0.0;
  double predicted_speed = 0.0;
  std::vector<double> unwrapped_tau;
  EvolutionTrace trace;

  double relative_error() const {
    return std::abs(measured_speed - predicted_speed) / std::abs(predicted_speed);
  }
};

/// Evolves a profile under `model` and fits its travelling speed.
TravelReport travel_test(const Field& profile, double predicted_speed,
                         const NonlinearityModel& model, double t_end,
                         const TravelOptions& opts = {});

/// Ground-state version: the prediction is gs.speed moved from the frame of
/// the model gs was computed with into the frame of `model`.
TravelReport travel_test(const GroundState& gs, const NonlinearityModel& model, double t_end,
                         const TravelOptions& opts = {});

}  // namespace soliton
