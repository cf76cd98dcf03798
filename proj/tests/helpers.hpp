#pragma once

#include <cmath>
#include <random>

#include "soliton/spectral.hpp"

namespace testing_support {

// mKdV(k) solitary wave A sech^{2/k}(B (x - x0)) at speed c.
inline soliton::Field mkdv_soliton(const soliton::GridPtr& grid, double k, double c, double x0) {
  const double amp = std::pow((k + 1.0) * (k + 2.0) * c / 2.0, 1.0 / k);
  const double b = k * std::sqrt(c) / 2.0;
  return soliton::Field::sample(grid, [&](double x) {
    return amp * std::pow(1.0 / std::cosh(b * std::remainder(x - x0, grid->length())), 2.0 / k);
  });
}

// (c/2) sech^2(sqrt(c)(x - x0)/2), a solitary wave of u_t + u_xxx + 6 u u_x = 0.
inline soliton::Field kdv_soliton(const soliton::GridPtr& grid, double c, double x0) {
  return soliton::Field::sample(grid, [&](double x) {
    const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * std::remainder(x - x0, grid->length()));
    return 0.5 * c * s * s;
  });
}

// Random smooth field with modes 1..modes, unit-order amplitude.
inline soliton::Field random_smooth(const soliton::GridPtr& grid, std::mt19937_64& rng,
                                    int modes = 6, double scale = 1.0) {
  std::normal_distribution<double> normal;
  std::vector<double> a(modes), b(modes);
  for (int m = 0; m < modes; ++m) {
    a[m] = normal(rng) / (1.0 + m);
    b[m] = normal(rng) / (1.0 + m);
  }
  return soliton::Field::sample(grid, [&](double x) {
    double s = 0.0;
    for (int m = 0; m < modes; ++m) {
      const double k = grid->wavenumber(m + 1);
      s += a[m] * std::cos(k * x) + b[m] * std::sin(k * x);
    }
    return scale * s;
  });
}

inline double max_abs_diff(const soliton::Field& a, const soliton::Field& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

}  // namespace testing_support
