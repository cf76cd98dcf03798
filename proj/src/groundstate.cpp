#include "soliton/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "soliton/functionals.hpp"
#include "soliton/parallel.hpp"

namespace soliton {

std::string_view to_string(Mode mode) { return mode == Mode::Gkdv ? "gkdv" : "nls"; }

namespace {

// The functional being minimized and its constraint C(u) = kappa * integral u^2.
class ConstrainedProblem {
 public:
  ConstrainedProblem(const NonlinearityModel& model, Mode mode)
      : model_(model), mode_(mode), kappa_(mode == Mode::Gkdv ? 0.5 : 1.0) {}

  double kappa() const { return kappa_; }

  double potential(double s) const {
    return mode_ == Mode::Gkdv ? model_.w(s) : model_.w(std::abs(s));
  }
  double potential_prime(double s) const {
    if (mode_ == Mode::Gkdv) return model_.w_prime(s);
    return s < 0.0 ? -model_.w_prime(-s) : model_.w_prime(s);
  }

  double constraint(const Field& u) const { return kappa_ * l2_norm_squared(u); }

  double energy(const Field& u) const {
    const Field ux = derivative(u, 1);
    double sum = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) sum += 0.5 * ux[j] * ux[j] + potential(u[j]);
    return u.grid().dx() * sum;
  }

  // E'(u) = -u_xx + W'(u), with the spectrum of u supplied.
  Field gradient(const Field& u, const Spectrum& u_hat) const {
    Spectrum s = u_hat;
    apply_derivative(u.grid(), s, 2);
    std::vector<double> g = inverse(u.grid(), s);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = -g[j] + potential_prime(u[j]);
    return Field(u.grid_ptr(), std::move(g));
  }

 private:
  const NonlinearityModel& model_;
  Mode mode_;
  double kappa_;
};

// (I - d_xx)^{-1} applied in transform space.
Field precondition(const Grid& grid, const GridPtr& ptr, Spectrum s) {
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double k = grid.wavenumber(j);
    s[j] /= 1.0 + k * k;
  }
  return Field(ptr, inverse(grid, s));
}

Field rescale_to(const ConstrainedProblem& problem, Field u, double target) {
  const double c = problem.constraint(u);
  if (!(c > 0.0)) throw NumericalError("iterate lost all charge");
  u *= std::sqrt(target / c);
  return u;
}

struct Stationarity {
  double multiplier;  // E' = multiplier * C'
  double residual;    // || E' - multiplier C' ||
  Field projected;    // E' minus its component along u
};

Stationarity stationarity(const ConstrainedProblem& problem, const Field& u, const Field& grad) {
  const double uu = inner(u, u);
  const double gu = inner(grad, u);
  Field r = grad;
  r -= (gu / uu) * u;
  const double norm = l2_norm(r);
  return {gu / (2.0 * problem.kappa() * uu), norm, std::move(r)};
}

// Integer rotation so that max |u| lands on index n/2 (x = L/2).
Field recentre(const Field& u, bool flip_allowed) {
  const std::size_t n = u.size();
  std::size_t peak = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs(u[j]) > std::abs(u[peak])) peak = j;
  const std::size_t shift = (n / 2 + n - peak) % n;
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[(j + shift) % n] = u[j];
  if (flip_allowed && v[n / 2] < 0.0)
    for (double& x : v) x = -x;
  return Field(u.grid_ptr(), std::move(v));
}

GroundState minimize(const NonlinearityModel& model, const GridPtr& grid, double target,
                     Mode mode, const MinimizerOptions& opts) {
  if (!grid) throw DomainError("minimizer needs a grid");
  if (!(target > 0.0) || !std::isfinite(target))
    throw DomainError("charge target must be positive");
  if (!(opts.tol > 0.0)) throw DomainError("minimizer tolerance must be positive");

  const ConstrainedProblem problem(model, mode);
  const Grid& g = *grid;
  const double centre = 0.5 * g.length();
  Field u = Field::sample(grid, [&](double x) { return std::exp(-(x - centre) * (x - centre) / 4.0); });
  u = rescale_to(problem, std::move(u), target);

  GroundState gs{.profile = u, .energy_history = {}};
  gs.charge_target = target;
  gs.mode = mode;
  gs.shift_speed = model.shift_speed();

  double e = problem.energy(u);
  Spectrum u_hat = forward(u);
  Field grad = problem.gradient(u, u_hat);
  Stationarity st = stationarity(problem, u, grad);
  if (opts.record_history) gs.energy_history.push_back(e);

  const double eps = std::numeric_limits<double>::epsilon();
  std::size_t it = 0;
  while (st.residual >= opts.tol && it < opts.max_iterations) {
    // Sobolev gradient, projected so that <step, u> = 0. Built from the
    // L2-projected residual so the slope carries no O(1) cancellation.
    const Field p = precondition(g, grid, forward(st.projected));
    const Field q = precondition(g, grid, u_hat);
    Field step = p;
    step -= (inner(p, u) / inner(q, u)) * q;
    const double slope = inner(st.projected, step);
    if (!(slope > 0.0)) break;

    const double noise = 1e3 * eps * (1.0 + std::abs(e));
    double sigma = opts.initial_step;
    bool accepted = false;
    while (sigma >= opts.min_step) {
      Field trial = u;
      trial -= sigma * step;
      trial = rescale_to(problem, std::move(trial), target);
      const double e_trial = problem.energy(trial);
      if (!std::isfinite(e_trial)) throw NumericalError("energy became non-finite during descent");
      if (e_trial < opts.energy_floor) {
        std::ostringstream os;
        os << "supercritical collapse: energy " << e_trial << " fell below floor "
           << opts.energy_floor << " after " << it << " iterations";
        throw NumericalError(os.str());
      }
      bool ok = e_trial <= e - opts.armijo * sigma * slope;
      Spectrum trial_hat;
      Field trial_grad(grid);
      Stationarity trial_st{0.0, 0.0, Field(grid)};
      if (!ok && sigma * slope <= noise) {
        // The predicted decrease is below the rounding level of E, so the
        // energy cannot rank the step; bound the gradient growth instead.
        trial_hat = forward(trial);
        trial_grad = problem.gradient(trial, trial_hat);
        trial_st = stationarity(problem, trial, trial_grad);
        ok = trial_st.residual <= 2.0 * st.residual && e_trial <= e + noise;
      }
      if (ok) {
        u = std::move(trial);
        e = e_trial;
        if (trial_hat.empty()) {
          u_hat = forward(u);
          grad = problem.gradient(u, u_hat);
          st = stationarity(problem, u, grad);
        } else {
          u_hat = std::move(trial_hat);
          grad = std::move(trial_grad);
          st = trial_st;
        }
        accepted = true;
        break;
      }
      sigma *= 0.5;
    }
    ++it;
    if (!accepted) break;
    if (opts.record_history) gs.energy_history.push_back(e);
  }

  const bool flip = mode == Mode::Nls || model.is_even();
  gs.profile = rescale_to(problem, recentre(u, flip), target);
  const Spectrum final_hat = forward(gs.profile);
  const Field final_grad = problem.gradient(gs.profile, final_hat);
  const Stationarity fin = stationarity(problem, gs.profile, final_grad);
  gs.energy = problem.energy(gs.profile);
  gs.multiplier = fin.multiplier;
  gs.iterations = it;
  gs.converged = fin.residual < opts.tol;
  if (mode == Mode::Gkdv) {
    gs.speed = -fin.multiplier;
    gs.residual = fin.residual;
  } else {
    gs.speed = fin.multiplier;
    gs.residual = standing_wave_residual(gs.profile, model, gs.speed);
  }
  return gs;
}

}  // namespace

GroundState minimize_energy_at_charge(const NonlinearityModel& model, const GridPtr& grid,
                                      double charge_target, const MinimizerOptions& opts) {
  return minimize(model, grid, charge_target, Mode::Gkdv, opts);
}

GroundState nls_ground_state(const NonlinearityModel& model, const GridPtr& grid,
                             double mass_target, const MinimizerOptions& opts) {
  return minimize(model, grid, mass_target, Mode::Nls, opts);
}

double standing_wave_residual(const Field& u, const NonlinearityModel& model, double omega) {
  const Field uxx = derivative(u, 2);
  std::vector<double> r(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double s = u[j];
    const double wp = s < 0.0 ? -model.w_prime(-s) : model.w_prime(s);
    r[j] = -0.5 * uxx[j] + 0.5 * wp - omega * s;
  }
  return l2_norm(Field(u.grid_ptr(), std::move(r)));
}

double nls_time_residual(const Field& u, const NonlinearityModel& model, double omega,
                         double t) {
  const double c = std::cos(omega * t);
  const double s = -std::sin(omega * t);
  // psi = u e^{-i omega t} split into real and imaginary parts.
  Field re = c * u;
  Field im = s * u;
  const Field re_xx = derivative(re, 2);
  const Field im_xx = derivative(im, 2);
  const double w2 = model.w_second(0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = std::hypot(re[j], im[j]);
    // W'(psi) = F'(|psi|) psi / |psi|, with F'(r)/r -> W''(0) at r = 0.
    const double ratio = r > 0.0 ? model.w_prime(r) / r : w2;
    const double rhs_re = -0.5 * re_xx[j] + 0.5 * ratio * re[j];
    const double rhs_im = -0.5 * im_xx[j] + 0.5 * ratio * im[j];
    // i psi_t = omega psi.
    const double lhs_re = omega * re[j];
    const double lhs_im = omega * im[j];
    sum += (lhs_re - rhs_re) * (lhs_re - rhs_re) + (lhs_im - rhs_im) * (lhs_im - rhs_im);
  }
  return std::sqrt(u.grid().dx() * sum);
}

std::vector<SpeedChargeRow> speed_charge_curve(const NonlinearityModel& model,
                                               const GridPtr& grid,
                                               const std::vector<double>& charges,
                                               const MinimizerOptions& opts, std::size_t jobs) {
  if (charges.empty()) throw DomainError("speed-charge curve needs at least one charge");
  for (std::size_t i = 0; i < charges.size(); ++i) {
    if (!(charges[i] > 0.0)) throw DomainError("charges must be positive");
    if (i > 0 && !(charges[i] > charges[i - 1]))
      throw DomainError("charges must be strictly increasing");
  }
  std::vector<SpeedChargeRow> rows(charges.size());
  parallel_for(charges.size(), jobs, [&](std::size_t i) {
    SpeedChargeRow& row = rows[i];
    row.charge = charges[i];
    try {
      const GroundState gs = minimize_energy_at_charge(model, grid, charges[i], opts);
      row.speed = gs.speed;
      row.physical_speed = gs.physical_speed();
      row.energy = gs.energy;
      row.residual = gs.residual;
      row.iterations = gs.iterations;
      row.converged = gs.converged;
      if (!gs.converged) row.error = "not converged";
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });
  return rows;
}

}  // namespace soliton
