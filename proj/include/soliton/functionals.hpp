#pragma once

#include <optional>

#include "soliton/model.hpp"
#include "soliton/spectral.hpp"

namespace soliton {

/// E(u) = integral of (1/2) u_x^2 + W(u), u_x taken spectrally.
double energy(const Field& u, const NonlinearityModel& model);

/// C(u) = (1/2) integral of u^2.
double charge(const Field& u);

/// Squared L2 norm, integral of u^2.
double l2_norm_squared(const Field& u);
double l2_norm(const Field& u);

/// L2 inner product of two fields on the same grid.
double inner(const Field& a, const Field& b);

double h1_norm(const Field& u);
double h1_distance(const Field& u, const Field& v);

/// E'(u) = -u_xx + W'(u).
Field energy_gradient(const Field& u, const NonlinearityModel& model);

/// || -u_xx + W'(u) + c u ||_L2: the profile equation of a wave travelling
/// at speed c.
double eigen_residual(const Field& u, const NonlinearityModel& model, double c);

struct Observables {
  double energy;
  double charge;
  std::optional<double> hylenic_ratio;  // E / |C|, empty when C == 0
  double h1_norm;
};

Observables observables(const Field& u, const NonlinearityModel& model);

struct OrbitMatch {
  double distance;
  double tau;  // translate(u, tau) is the closest orbit member to the reference, in [-L/2, L/2)
};

/// Distance from fields to the translation orbit of a fixed reference in the
/// H1 norm. Keeps the reference spectrum so repeated queries during a time
/// evolution cost one transform each.
class OrbitMatcher {
 public:
  explicit OrbitMatcher(const Field& reference);

  OrbitMatch match(const Field& u) const;
  const Field& reference() const { return reference_; }

 private:
  double distance_squared(const Spectrum& u_hat, double tau) const;
  void derivatives(const Spectrum& u_hat, double tau, double& d1, double& d2) const;

  Field reference_;
  Spectrum ref_hat_;
  std::vector<double> weight_;  // half-spectrum multiplicity times (1 + k^2) dx / n
};

/// min over tau of h1_distance(translate(u, tau), v).
OrbitMatch orbital_distance(const Field& u, const Field& v);

}  // namespace soliton
