#include "soliton/evolution.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "soliton/functionals.hpp"

namespace soliton {

BlowUpError::BlowUpError(double time, EvolutionTrace partial)
    : NumericalError([&] {
        std::ostringstream os;
        os << "blow-up detected at t = " << time;
        return os.str();
      }()),
      time_(time),
      partial_(std::move(partial)) {}

namespace {

constexpr int kContourPoints = 16;

using cplx = std::complex<double>;

// Mean of f over a unit circle around z; removes the cancellation of the
// phi-functions near z = 0.
template <typename F>
cplx contour_mean(cplx z, F&& f) {
  cplx sum = 0.0;
  for (int m = 1; m <= kContourPoints; ++m) {
    const cplx r = std::polar(1.0, 2.0 * std::numbers::pi * (m - 0.5) / kContourPoints);
    sum += f(z + r);
  }
  return sum / static_cast<double>(kContourPoints);
}

double relative_drift(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  const double ref = series.front();
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - ref));
  return ref != 0.0 ? worst / std::abs(ref) : worst;
}

}  // namespace

EtdStepper::EtdStepper(const GridPtr& grid, const NonlinearityModel& model, double dt,
                       bool dealias, bool reverse_linear)
    : grid_(grid), model_(model), dt_(dt), dealias_(dealias) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
  const std::size_t m = grid_->modes();
  e_.resize(m);
  e2_.resize(m);
  q_.resize(m);
  f1_.resize(m);
  f2_.resize(m);
  f3_.resize(m);
  const double e0 = model_.e0();
  const double sign = reverse_linear ? -1.0 : 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double k = grid_->wavenumber(j);
    const cplx z(0.0, sign * (k * k * k + 2.0 * e0 * k) * dt);
    e_[j] = std::exp(z);
    e2_[j] = std::exp(z / 2.0);
    q_[j] = dt * contour_mean(z, [](cplx w) { return (std::exp(w / 2.0) - 1.0) / w; });
    f1_[j] = dt * contour_mean(z, [](cplx w) {
               return (-4.0 - w + std::exp(w) * (4.0 - 3.0 * w + w * w)) / (w * w * w);
             });
    f2_[j] = dt * contour_mean(z, [](cplx w) {
               return (2.0 + w + std::exp(w) * (w - 2.0)) / (w * w * w);
             });
    f3_[j] = dt * contour_mean(z, [](cplx w) {
               return (-4.0 - 3.0 * w - w * w + std::exp(w) * (4.0 - w)) / (w * w * w);
             });
  }
}

Spectrum EtdStepper::nonlinear(const Spectrum& v) const {
  const Grid& g = *grid_;
  std::vector<double> u = inverse(g, v);
  const double two_e0 = 2.0 * model_.e0();
  for (double& s : u) s = std::isfinite(s) ? model_.w_prime(s) - two_e0 * s : s;
  Spectrum w = forward(g, u);
  if (dealias_) w = dealias(g, std::move(w));
  apply_derivative(g, w, 1);
  return w;
}

void EtdStepper::step(Spectrum& v) const {
  const std::size_t m = v.size();
  const Spectrum nv = nonlinear(v);
  Spectrum a(m), b(m), c(m);
  for (std::size_t j = 0; j < m; ++j) a[j] = e2_[j] * v[j] + q_[j] * nv[j];
  const Spectrum na = nonlinear(a);
  for (std::size_t j = 0; j < m; ++j) b[j] = e2_[j] * v[j] + q_[j] * na[j];
  const Spectrum nb = nonlinear(b);
  for (std::size_t j = 0; j < m; ++j) c[j] = e2_[j] * a[j] + q_[j] * (2.0 * nb[j] - nv[j]);
  const Spectrum nc = nonlinear(c);
  for (std::size_t j = 0; j < m; ++j)
    v[j] = e_[j] * v[j] + nv[j] * f1_[j] + 2.0 * (na[j] + nb[j]) * f2_[j] + nc[j] * f3_[j];
}

EvolutionTrace evolve(const Field& u0, const NonlinearityModel& model, double dt, double t_end,
                      const EvolutionOptions& opts) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("end time must be >= 0");
  if (!(opts.sample_stride > 0.0)) throw DomainError("sample stride must be positive");
  if (opts.reference) require_same_grid(u0, *opts.reference);

  const GridPtr& grid = u0.grid_ptr();
  const Grid& g = *grid;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw DomainError("end time must be a whole number of time steps");
  const auto stride = std::max<std::size_t>(1, std::llround(opts.sample_stride / dt));

  EvolutionTrace trace;
  trace.well_posedness_guaranteed = well_posedness_guaranteed(model);
  std::optional<OrbitMatcher> matcher;
  if (opts.reference) matcher.emplace(*opts.reference);

  std::size_t samples = 0;
  auto record = [&](const Field& u, double t) {
    trace.times.push_back(t);
    trace.energy_series.push_back(energy(u, model));
    trace.charge_series.push_back(charge(u));
    if (matcher) {
      const OrbitMatch m = matcher->match(u);
      trace.orbital_distance.push_back(m.distance);
      trace.best_tau.push_back(m.tau);
    }
    if (opts.snapshot_every > 0 && samples % opts.snapshot_every == 0) {
      trace.snapshots.push_back(u);
      trace.snapshot_times.push_back(t);
    }
    ++samples;
  };
  auto finish = [&](const Field& u) {
    trace.energy_drift = relative_drift(trace.energy_series);
    trace.charge_drift = relative_drift(trace.charge_series);
    trace.final_state = u;
  };

  record(u0, 0.0);
  const EtdStepper stepper(grid, model, dt, opts.dealias, opts.reverse_linear);
  Spectrum v = forward(u0);
  Field current = u0;
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.step(v);
    const bool sample = n % stride == 0 || n == steps;
    bool blown = false;
    for (const auto& c : v)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        blown = true;
        break;
      }
    std::vector<double> values;
    if (!blown && (sample || n % 64 == 0)) {
      values = inverse(g, v);
      for (double s : values)
        if (std::abs(s) > opts.blowup_amplitude) {
          blown = true;
          break;
        }
    }
    const double t = static_cast<double>(n) * dt;
    if (blown) {
      finish(current);
      throw BlowUpError(t, std::move(trace));
    }
    if (sample) {
      current = Field(grid, std::move(values));
      record(current, t);
    }
  }
  finish(current);
  return trace;
}

double measure_speed(const std::vector<double>& times, const std::vector<double>& taus,
                     double length, std::vector<double>* unwrapped) {
  if (times.size() != taus.size()) throw DomainError("times and offsets differ in length");
  if (times.size() < 2 || times.back() == times.front())
    throw DomainError("insufficient samples to fit a speed");
  std::vector<double> u(taus.size());
  u[0] = taus[0];
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const double wraps = std::round((u[i - 1] - taus[i]) / length);
    u[i] = taus[i] + wraps * length;
  }
  const double n = static_cast<double>(times.size());
  double st = 0, su = 0, stt = 0, stu = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    st += times[i];
    su += u[i];
    stt += times[i] * times[i];
    stu += times[i] * u[i];
  }
  const double slope = (n * stu - st * su) / (n * stt - st * st);
  if (unwrapped) *unwrapped = std::move(u);
  // translate(u(t), tau) matches the profile, so tau(t) = -c t.
  return -slope;
}

TravelReport travel_test(const Field& profile, double predicted_speed,
                         const NonlinearityModel& model, double t_end, const TravelOptions& opts) {
  EvolutionOptions eo;
  eo.sample_stride = opts.sample_stride;
  eo.dealias = opts.dealias;
  eo.reference = profile;
  TravelReport report;
  report.trace = evolve(profile, model, opts.dt, t_end, eo);
  report.predicted_speed = predicted_speed;
  for (double d : report.trace.orbital_distance)
    report.max_orbital_distance = std::max(report.max_orbital_distance, d);
  report.measured_speed = measure_speed(report.trace.times, report.trace.best_tau,
                                        profile.grid().length(), &report.unwrapped_tau);
  return report;
}

TravelReport travel_test(const GroundState& gs, const NonlinearityModel& model, double t_end,
                         const TravelOptions& opts) {
  if (gs.mode != Mode::Gkdv) throw DomainError("travel test needs a gKdV ground state");
  if (!gs.converged) throw DomainError("travel test needs a converged ground state");
  const double predicted = gs.speed + gs.shift_speed - model.shift_speed();
  return travel_test(gs.profile, predicted, model, t_end, opts);
}

}  // namespace soliton
