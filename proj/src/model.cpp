#include "soliton/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace soliton {

namespace {

double ipow(double s, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= s;
  return r;
}

void require_finite(double s) {
  if (!std::isfinite(s)) throw DomainError("W evaluated at a non-finite argument");
}

// Least-squares slope of log|y| against log|x|.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] == 0.0) continue;
    const double lx = std::log(std::abs(xs[i]));
    const double ly = std::log(std::abs(ys[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::pow(10.0, a + (b - a) * t);
  }
  return out;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Mkdv: return "mkdv";
    case Family::AbsPower: return "abs_power";
    case Family::Polynomial: return "polynomial";
  }
  return "unknown";
}

std::string_view to_string(Assumption a) {
  switch (a) {
    case Assumption::Wa: return "Wa";
    case Assumption::Wb: return "Wb";
    case Assumption::W1: return "W1";
    case Assumption::Wp: return "Wp";
    case Assumption::W0: return "W0";
    case Assumption::Base: return "base";
  }
  return "unknown";
}

NonlinearityModel::NonlinearityModel(Family family, double k, std::vector<double> coeffs)
    : family_(family), k_(k), coeffs_(std::move(coeffs)) {
  if (family_ == Family::Polynomial) family_e0_ = coeffs_.front();
}

NonlinearityModel NonlinearityModel::mkdv(double k) {
  if (!(k > 0.0) || std::floor(k) != k || k > 64.0)
    throw DomainError("mkdv exponent must be a positive integer");
  return NonlinearityModel(Family::Mkdv, k, {});
}

NonlinearityModel NonlinearityModel::abs_power(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("abs_power exponent must be positive");
  return NonlinearityModel(Family::AbsPower, k, {});
}

NonlinearityModel NonlinearityModel::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw DomainError("polynomial model needs at least the s^2 coefficient");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw DomainError("polynomial coefficients must be finite");
  return NonlinearityModel(Family::Polynomial, 0.0, std::move(coeffs));
}

double NonlinearityModel::family_w(double s) const {
  switch (family_) {
    case Family::Mkdv: {
      const int e = static_cast<int>(k_);
      return -ipow(s, e + 2) / ((k_ + 2.0) * (k_ + 1.0));
    }
    case Family::AbsPower:
      return -std::pow(std::abs(s), k_ + 2.0);
    case Family::Polynomial: {
      // Horner on a[0] + a[1] s + ..., times s^2.
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
      return acc * s * s;
    }
  }
  return 0.0;
}

double NonlinearityModel::family_w_prime(double s) const {
  switch (family_) {
    case Family::Mkdv: {
      const int e = static_cast<int>(k_);
      return -ipow(s, e + 1) / (k_ + 1.0);
    }
    case Family::AbsPower:
      return -(k_ + 2.0) * std::pow(std::abs(s), k_) * s;
    case Family::Polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 0;)
        acc = acc * s + static_cast<double>(i + 2) * coeffs_[i];
      return acc * s;
    }
  }
  return 0.0;
}

double NonlinearityModel::family_w_second(double s) const {
  switch (family_) {
    case Family::Mkdv:
      return -ipow(s, static_cast<int>(k_));
    case Family::AbsPower:
      return -(k_ + 2.0) * (k_ + 1.0) * std::pow(std::abs(s), k_);
    case Family::Polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 0;)
        acc = acc * s + static_cast<double>((i + 2) * (i + 1)) * coeffs_[i];
      return acc;
    }
  }
  return 0.0;
}

double NonlinearityModel::w(double s) const {
  require_finite(s);
  return family_w(s) + added_quadratic_ * s * s;
}

double NonlinearityModel::w_prime(double s) const {
  require_finite(s);
  return family_w_prime(s) + 2.0 * added_quadratic_ * s;
}

double NonlinearityModel::w_second(double s) const {
  require_finite(s);
  return family_w_second(s) + 2.0 * added_quadratic_;
}

double NonlinearityModel::n(double s) const { return w(s) - e0() * s * s; }

double NonlinearityModel::n_prime(double s) const { return w_prime(s) - 2.0 * e0() * s; }

bool NonlinearityModel::is_even() const {
  switch (family_) {
    case Family::Mkdv: return static_cast<int>(k_) % 2 == 0;
    case Family::AbsPower: return true;
    case Family::Polynomial:
      for (std::size_t i = 1; i < coeffs_.size(); i += 2)
        if (coeffs_[i] != 0.0) return false;
      return true;
  }
  return false;
}

NonlinearityModel NonlinearityModel::unshifted() const { return with_added_quadratic(0.0); }

NonlinearityModel NonlinearityModel::with_added_quadratic(double a) const {
  NonlinearityModel copy = *this;
  copy.added_quadratic_ = a;
  return copy;
}

std::string NonlinearityModel::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  if (family_ == Family::Polynomial) {
    os << "[";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
    os << "]";
  } else {
    os << "(k=" << k_ << ")";
  }
  if (is_shifted()) os << " + " << added_quadratic_ << " s^2";
  return os.str();
}

GaugeShift gauge_shift(const NonlinearityModel& model) {
  if (model.w_second(0.0) > 0.0) return {model, 0.0};
  // W''(0) = 2 E0; adding (1 - E0) s^2 brings it to 2.
  const double a = model.added_quadratic() + (1.0 - model.e0());
  NonlinearityModel shifted = model.with_added_quadratic(a);
  return {shifted, shifted.shift_speed() - model.shift_speed()};
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck& AssumptionReport::at(Assumption a) const {
  for (const auto& c : checks)
    if (c.name == a) return c;
  throw DomainError("assumption missing from report");
}

namespace {

bool builtin(const NonlinearityModel& m) { return m.family() != Family::Polynomial; }

// -W''(s)/s^4 at |s| = big and big/10 on both sides; a side passes when the
// ratio is non-positive or decaying.
AssumptionCheck sampled_base(const NonlinearityModel& model, double big) {
  AssumptionCheck check{Assumption::Base, true, {}, "sampled at large |s|"};
  for (double sign : {1.0, -1.0}) {
    const double s_big = sign * big;
    const double s_mid = s_big / 10.0;
    const double v_big = -model.w_second(s_big) / std::pow(s_big, 4);
    const double v_mid = -model.w_second(s_mid) / std::pow(s_mid, 4);
    check.witness.push_back(s_big);
    check.witness.push_back(v_big);
    const bool ok = v_big <= 0.0 || v_big <= 0.5 * v_mid;
    check.passed = check.passed && ok;
  }
  return check;
}

}  // namespace

bool well_posedness_guaranteed(const NonlinearityModel& model) {
  if (builtin(model)) return model.exponent() < 4.0;
  return sampled_base(model, 1e6).passed;
}

AssumptionReport check_assumptions(const NonlinearityModel& model, SampleRange range,
                                   std::size_t samples) {
  if (!(range.max > range.min) || !std::isfinite(range.min) || !std::isfinite(range.max))
    throw DomainError("sample range is empty");
  if (samples < 100) throw DomainError("check_assumptions needs at least 100 samples");
  const double big = std::max(std::abs(range.min), std::abs(range.max));

  AssumptionReport report;

  {
    const double w0 = model.w(0.0);
    const double wp0 = model.w_prime(0.0);
    report.checks.push_back({Assumption::Wa, w0 == 0.0 && wp0 == 0.0, {w0, wp0}, "W(0), W'(0)"});
  }
  {
    const double wpp0 = 2.0 * model.e0();
    report.checks.push_back({Assumption::Wb, wpp0 > 0.0, {wpp0}, "W''(0) = 2 E0"});
  }
  {
    // One s0 > 0 with N(s0) < 0 suffices.
    AssumptionCheck check{Assumption::W1, false, {}, "N(s0) < 0 search"};
    const double hi = range.max > 0.0 ? range.max : big;
    const auto pts = logspace(hi * 1e-8, hi, 10000);
    for (double s : pts) {
      const double v = model.n(s);
      if (v < 0.0) {
        check.passed = true;
        check.witness = {s, v};
        break;
      }
    }
    if (!check.passed) check.witness = {hi, model.n(hi)};
    report.checks.push_back(std::move(check));
  }

  double p_growth = std::numeric_limits<double>::quiet_NaN();
  if (builtin(model)) {
    const double e = model.exponent() + 2.0;
    report.checks.push_back({Assumption::Wp, e > 2.0, {e, e}, "r = q = k + 2"});
    p_growth = e;
    report.checks.push_back({Assumption::W0, e > 2.0, {e}, "p = k + 2"});
  } else {
    const std::size_t m = std::max<std::size_t>(samples / 4, 25);
    auto fit = [&](double lo, double hi) {
      const auto pts = logspace(lo, hi, m);
      double slope = -std::numeric_limits<double>::infinity();
      for (double sign : {1.0, -1.0}) {
        std::vector<double> xs, ys;
        for (double s : pts) {
          xs.push_back(s);
          ys.push_back(model.n_prime(sign * s));
        }
        const double sl = loglog_slope(xs, ys);
        if (std::isfinite(sl)) slope = std::max(slope, sl);
      }
      return slope;
    };
    const double r = fit(1e-6, 1e-4) + 1.0;
    const double q = fit(1e4, 1e6) + 1.0;
    if (!std::isfinite(r) || !std::isfinite(q)) {
      report.checks.push_back({Assumption::Wp, true, {}, "N' identically zero"});
    } else {
      report.checks.push_back({Assumption::Wp, r > 2.0 && q > 2.0, {r, q}, "fitted r, q"});
    }

    // Growth exponent of the negative part of N at large |s|.
    const auto pts = logspace(1e4, 1e6, m);
    double p = -std::numeric_limits<double>::infinity();
    for (double sign : {1.0, -1.0}) {
      std::vector<double> xs, ys;
      for (double s : pts) {
        const double v = model.n(sign * s);
        if (v < 0.0) {
          xs.push_back(s);
          ys.push_back(v);
        }
      }
      if (xs.size() >= 2) p = std::max(p, loglog_slope(xs, ys));
    }
    if (std::isfinite(p)) {
      p_growth = p;
      report.checks.push_back({Assumption::W0, p > 2.0, {p}, "fitted p"});
    } else {
      report.checks.push_back({Assumption::W0, true, {}, "N >= 0 for large |s|"});
    }
  }
  if (std::isfinite(p_growth) && p_growth >= 6.0) {
    std::ostringstream os;
    os << "W0: growth exponent p = " << p_growth << " is not below 6";
    report.warnings.push_back(os.str());
  }

  if (builtin(model)) {
    AssumptionCheck check{Assumption::Base, model.exponent() < 4.0, {}, "analytic: k < 4"};
    for (double s : {big, -big}) {
      check.witness.push_back(s);
      check.witness.push_back(-model.w_second(s) / std::pow(s, 4));
    }
    report.checks.push_back(std::move(check));
  } else {
    report.checks.push_back(sampled_base(model, std::max(big, 1.0) * 1e3));
  }
  if (!report.at(Assumption::Base).passed)
    report.warnings.push_back("well-posedness not guaranteed: large-|s| growth condition fails");
  return report;
}

}  // namespace soliton
