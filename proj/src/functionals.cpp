#include "soliton/functionals.hpp"

#include <cmath>
#include <numbers>

namespace soliton {

double energy(const Field& u, const NonlinearityModel& model) {
  const Field ux = derivative(u, 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) sum += 0.5 * ux[j] * ux[j] + model.w(u[j]);
  return u.grid().dx() * sum;
}

double l2_norm_squared(const Field& u) {
  double sum = 0.0;
  for (double v : u.values()) sum += v * v;
  return u.grid().dx() * sum;
}

double l2_norm(const Field& u) { return std::sqrt(l2_norm_squared(u)); }

double charge(const Field& u) { return 0.5 * l2_norm_squared(u); }

double inner(const Field& a, const Field& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
  return a.grid().dx() * sum;
}

double h1_norm(const Field& u) {
  return std::sqrt(l2_norm_squared(u) + l2_norm_squared(derivative(u, 1)));
}

double h1_distance(const Field& u, const Field& v) {
  require_same_grid(u, v);
  return h1_norm(u - v);
}

Field energy_gradient(const Field& u, const NonlinearityModel& model) {
  Spectrum s = forward(u);
  apply_derivative(u.grid(), s, 2);
  std::vector<double> g = inverse(u.grid(), s);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = -g[j] + model.w_prime(u[j]);
  return Field(u.grid_ptr(), std::move(g));
}

double eigen_residual(const Field& u, const NonlinearityModel& model, double c) {
  Field r = energy_gradient(u, model);
  r += c * u;
  return l2_norm(r);
}

Observables observables(const Field& u, const NonlinearityModel& model) {
  Observables o{energy(u, model), charge(u), std::nullopt, h1_norm(u)};
  if (o.charge > 0.0) o.hylenic_ratio = o.energy / o.charge;
  return o;
}

namespace {

double wrap_tau(double tau, double length) {
  double t = std::fmod(tau, length);
  if (t < -0.5 * length) t += length;
  if (t >= 0.5 * length) t -= length;
  return t;
}

}  // namespace

OrbitMatcher::OrbitMatcher(const Field& reference)
    : reference_(reference), ref_hat_(forward(reference)) {
  const Grid& g = reference_.grid();
  const double scale = g.dx() / static_cast<double>(g.n());
  weight_.resize(g.modes());
  for (std::size_t j = 0; j < g.modes(); ++j) {
    const double k = g.wavenumber(j);
    const double mult = (j == 0 || j == g.nyquist()) ? 1.0 : 2.0;
    weight_[j] = mult * (1.0 + k * k) * scale;
  }
}

double OrbitMatcher::distance_squared(const Spectrum& u_hat, double tau) const {
  const Grid& g = reference_.grid();
  Spectrum shifted = u_hat;
  apply_translation(g, shifted, tau);
  double sum = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) sum += weight_[j] * std::norm(shifted[j] - ref_hat_[j]);
  return sum;
}

// First and second tau-derivatives of distance_squared.
void OrbitMatcher::derivatives(const Spectrum& u_hat, double tau, double& d1, double& d2) const {
  const Grid& g = reference_.grid();
  d1 = 0.0;
  d2 = 0.0;
  const std::size_t nyq = g.nyquist();
  for (std::size_t j = 1; j < nyq; ++j) {
    const double k = g.wavenumber(j);
    const std::complex<double> phase = std::polar(1.0, -k * tau);
    const std::complex<double> x = u_hat[j] * std::conj(ref_hat_[j]) * phase;
    // |a e - b|^2 = |a|^2 + |b|^2 - 2 Re(a conj(b) e).
    d1 += -2.0 * weight_[j] * (std::complex<double>(0.0, -k) * x).real();
    d2 += -2.0 * weight_[j] * (-k * k * x).real();
  }
  const double k = g.wavenumber(nyq);
  const double a = u_hat[nyq].real();
  const double b = ref_hat_[nyq].real();
  const double c = std::cos(k * tau);
  const double s = std::sin(k * tau);
  d1 += weight_[nyq] * 2.0 * (a * c - b) * (-a * k * s);
  d2 += weight_[nyq] * 2.0 * ((a * k * s) * (a * k * s) + (a * c - b) * (-a * k * k * c));
}

OrbitMatch OrbitMatcher::match(const Field& u) const {
  require_same_grid(u, reference_);
  const Grid& g = reference_.grid();
  const Spectrum u_hat = forward(u);

  // Coarse: the H1 cross-correlation at every grid shift in one inverse transform.
  Spectrum corr(g.modes());
  for (std::size_t j = 0; j < g.modes(); ++j) {
    const double k = g.wavenumber(j);
    corr[j] = std::conj((1.0 + k * k) * u_hat[j] * std::conj(ref_hat_[j]));
  }
  const std::vector<double> cross = inverse(g, corr);
  std::size_t best = 0;
  for (std::size_t m = 1; m < cross.size(); ++m)
    if (cross[m] > cross[best]) best = m;

  double best_tau = static_cast<double>(best) * g.dx();
  double best_d2 = distance_squared(u_hat, best_tau);

  // Golden-section refinement inside the neighbouring grid cells.
  const double tol = 1e-10 * g.length();
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_tau - g.dx();
  double hi = best_tau + g.dx();
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = distance_squared(u_hat, x1);
  double f2 = distance_squared(u_hat, x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = distance_squared(u_hat, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = distance_squared(u_hat, x2);
    }
  }
  const double golden_tau = f1 < f2 ? x1 : x2;
  const double golden_d2 = std::min(f1, f2);
  if (golden_d2 < best_d2) {
    best_tau = golden_tau;
    best_d2 = golden_d2;
  }

  // Newton polish on the analytic derivative; the golden bracket alone
  // leaves tau uncertain at the tolerance, which shows up in the distance.
  for (int it = 0; it < 8; ++it) {
    double d1 = 0.0, d2 = 0.0;
    derivatives(u_hat, best_tau, d1, d2);
    if (!(d2 > 0.0)) break;
    const double step = d1 / d2;
    if (!(std::abs(step) <= g.dx())) break;
    const double trial = best_tau - step;
    const double trial_d2 = distance_squared(u_hat, trial);
    if (!(trial_d2 <= best_d2)) break;
    best_tau = trial;
    best_d2 = trial_d2;
    if (std::abs(step) < 1e-15 * g.length()) break;
  }

  return {std::sqrt(std::max(best_d2, 0.0)), wrap_tau(best_tau, g.length())};
}

OrbitMatch orbital_distance(const Field& u, const Field& v) {
  require_same_grid(u, v);
  return OrbitMatcher(v).match(u);
}

}  // namespace soliton
