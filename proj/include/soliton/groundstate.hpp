#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soliton/model.hpp"
#include "soliton/spectral.hpp"

namespace soliton {

enum class Mode { Gkdv, Nls };

std::string_view to_string(Mode mode);

struct MinimizerOptions {
  double tol = 1e-10;                 // projected-gradient L2 norm
  std::size_t max_iterations = 100000;
  double energy_floor = -1e6;         // below this the run is declared collapsing
  double armijo = 1e-4;
  double initial_step = 1.0;
  double min_step = 1e-14;
  bool record_history = false;
};

/// Constrained energy minimizer on the charge sphere.
///
/// Gkdv: charge is (1/2) integral u^2, E'(u) = multiplier * u and the profile
/// travels at speed = -multiplier under the model it was computed with.
/// Nls: charge is the mass integral u^2, the profile solves
/// -u''/2 + W'(u)/2 = omega u and speed = multiplier = omega.
struct GroundState {
  Field profile;
  double charge_target = 0.0;
  double energy = 0.0;
  double multiplier = 0.0;
  double speed = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  Mode mode = Mode::Gkdv;
  double shift_speed = 0.0;            // of the model used
  std::vector<double> energy_history;  // accepted iterates, when recorded

  /// Speed in the frame of the unshifted equation.
  double physical_speed() const { return speed + shift_speed; }
};

/// Sobolev-preconditioned projected gradient descent with backtracking,
/// started from a Gaussian at L/2. The result is recentred so max |u| sits
/// at L/2, with u(L/2) > 0 when W is even.
GroundState minimize_energy_at_charge(const NonlinearityModel& model, const GridPtr& grid,
                                      double charge_target, const MinimizerOptions& opts = {});

GroundState nls_ground_state(const NonlinearityModel& model, const GridPtr& grid,
                             double mass_target, const MinimizerOptions& opts = {});

/// || -u''/2 + W'(|u|) u/(2|u|) - omega u ||_L2 for a real profile.
double standing_wave_residual(const Field& u, const NonlinearityModel& model, double omega);

/// Inserts psi(t,x) = u(x) e^{-i omega t} into i psi_t = -psi_xx/2 + W'(psi)/2
/// and returns the L2 norm of the mismatch at time t.
double nls_time_residual(const Field& u, const NonlinearityModel& model, double omega,
                         double t = 0.0);

struct SpeedChargeRow {
  double charge = 0.0;
  double speed = 0.0;           // in the model's frame
  double physical_speed = 0.0;  // shift undone
  double energy = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<std::string> error;
};

/// One minimization per charge, rows in input order. Failures are recorded
/// per row. Charges must be positive and strictly increasing.
std::vector<SpeedChargeRow> speed_charge_curve(const NonlinearityModel& model,
                                               const GridPtr& grid,
                                               const std::vector<double>& charges,
                                               const MinimizerOptions& opts = {},
                                               std::size_t jobs = 1);

}  // namespace soliton
