#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "soliton/errors.hpp"

namespace soliton {

enum class Family { Mkdv, AbsPower, Polynomial };

std::string_view to_string(Family family);

/// The potential W(s) of the gKdV equation u_t + u_xxx - (W'(u))_x = 0,
/// written as W(s) = E0 s^2 + N(s).
///
/// Built-in families:
///   Mkdv(k):        W(s) = -s^(k+2) / ((k+2)(k+1)),   k a positive integer
///   AbsPower(k):    W(s) = -|s|^(k+2),                k > 0
///   Polynomial(a):  W(s) = a[0] s^2 + a[1] s^3 + ...
///
/// A gauge shift adds a quadratic term a s^2 on top of the family; it is
/// tracked separately so the unshifted counterpart can be recovered and the
/// moving-frame speed 2a reported.
class NonlinearityModel {
 public:
  static NonlinearityModel mkdv(double k);
  static NonlinearityModel abs_power(double k);
  static NonlinearityModel polynomial(std::vector<double> coeffs);

  Family family() const { return family_; }
  /// Exponent k for Mkdv/AbsPower; 0 for Polynomial.
  double exponent() const { return k_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  /// E0 = W''(0)/2, including any added quadratic.
  double e0() const { return family_e0_ + added_quadratic_; }
  /// Coefficient of the quadratic added by gauge_shift (0 when unshifted).
  double added_quadratic() const { return added_quadratic_; }
  /// Frame speed of the gauge shift: 2 * added_quadratic.
  double shift_speed() const { return 2.0 * added_quadratic_; }
  bool is_shifted() const { return added_quadratic_ != 0.0; }

  double w(double s) const;
  double w_prime(double s) const;
  double w_second(double s) const;

  /// N(s) = W(s) - E0 s^2 and its derivative.
  double n(double s) const;
  double n_prime(double s) const;

  /// True when W(-s) = W(s), so that both signs of a profile are admissible.
  bool is_even() const;

  /// Same family with the gauge-shift quadratic removed.
  NonlinearityModel unshifted() const;
  NonlinearityModel with_added_quadratic(double a) const;

  std::string describe() const;

 private:
  NonlinearityModel(Family family, double k, std::vector<double> coeffs);

  double family_w(double s) const;
  double family_w_prime(double s) const;
  double family_w_second(double s) const;

  Family family_;
  double k_ = 0.0;
  std::vector<double> coeffs_;
  double family_e0_ = 0.0;
  double added_quadratic_ = 0.0;
};

struct GaugeShift {
  NonlinearityModel model;
  double speed;
};

/// Makes W''(0) = 2 by adding (1 - E0) s^2 when W''(0) <= 0. Solutions v of
/// the shifted equation map to solutions u(t,x) = v(t, x - speed*t) of the
/// original one. Models with W''(0) > 0 are returned unchanged with speed 0.
GaugeShift gauge_shift(const NonlinearityModel& model);

enum class Assumption { Wa, Wb, W1, Wp, W0, Base };

inline constexpr std::array<Assumption, 6> kAllAssumptions = {
    Assumption::Wa, Assumption::Wb, Assumption::W1,
    Assumption::Wp, Assumption::W0, Assumption::Base};

std::string_view to_string(Assumption a);

struct AssumptionCheck {
  Assumption name;
  bool passed;
  std::vector<double> witness;
  std::string note;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  std::vector<std::string> warnings;

  bool all_passed() const;
  const AssumptionCheck& at(Assumption a) const;
};

struct SampleRange {
  double min;
  double max;
};

/// Checks the hypotheses on W: W(0)=W'(0)=0, W''(0)>0, a point with N<0,
/// power bounds on N' and N, and the large-|s| growth bound on -W''/s^4 that
/// guarantees global well-posedness.
AssumptionReport check_assumptions(const NonlinearityModel& model,
                                   SampleRange range, std::size_t samples);

/// The large-|s| condition limsup -W''(s)/s^4 <= 0 alone.
bool well_posedness_guaranteed(const NonlinearityModel& model);

}  // namespace soliton
