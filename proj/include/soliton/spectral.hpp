#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "soliton/model.hpp"

namespace soliton {

/// Uniform periodic grid x_j = j*dx on [0, L), n a power of two >= 64.
class Grid {
 public:
  Grid(std::size_t n, double length);

  std::size_t n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / static_cast<double>(n_); }
  double x(std::size_t j) const { return static_cast<double>(j) * dx(); }

  /// Number of stored half-spectrum modes, n/2 + 1.
  std::size_t modes() const { return n_ / 2 + 1; }
  std::size_t nyquist() const { return n_ / 2; }
  /// k_j = 2 pi j / L for the half spectrum j = 0..n/2.
  double wavenumber(std::size_t j) const { return wavenumbers_[j]; }
  std::span<const double> wavenumbers() const { return wavenumbers_; }
  double k_max() const { return wavenumbers_.back(); }
  /// Full table in standard FFT order: 0, 1, ..., n/2-1, -n/2, ..., -1.
  std::vector<double> full_wavenumbers() const;

  bool operator==(const Grid& other) const {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  std::size_t n_;
  double length_;
  std::vector<double> wavenumbers_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::size_t n, double length);

/// Half spectrum of a real field: unnormalized DFT coefficients j = 0..n/2.
using Spectrum = std::vector<std::complex<double>>;

/// Sampled real field on a grid. Values are always finite.
class Field {
 public:
  explicit Field(GridPtr grid);  // zero field
  Field(GridPtr grid, std::vector<double> values);

  static Field sample(GridPtr grid, const std::function<double(double)>& f);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  bool same_grid(const Field& other) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double a);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);

/// Throws DomainError unless both fields live on equal grids.
void require_same_grid(const Field& a, const Field& b);

// Transforms. Safe to call concurrently.
Spectrum forward(const Grid& grid, std::span<const double> values);
Spectrum forward(const Field& f);
/// Inverse of forward (includes the 1/n normalization).
std::vector<double> inverse(const Grid& grid, const Spectrum& spectrum);

/// (i k)^order times the spectrum; order in {1,2,3}. The Nyquist mode is
/// zeroed for odd orders.
Field derivative(const Field& f, int order);
void apply_derivative(const Grid& grid, Spectrum& spectrum, int order);

/// u(x - tau) by spectral phase shift; tau is taken mod L.
Field translate(const Field& f, double tau);
void apply_translation(const Grid& grid, Spectrum& spectrum, double tau);

/// Zeroes all modes with |k_j| > (2/3) k_max.
Spectrum dealias(const Grid& grid, Spectrum spectrum);
/// First half-spectrum index removed by dealias.
std::size_t dealias_cutoff(const Grid& grid);

/// Keeps only modes with |k_j| <= fraction * k_max.
Spectrum band_limit(const Grid& grid, Spectrum spectrum, double fraction);

// Serialization.
void write_csv(const Field& f, const std::filesystem::path& path);
Field read_csv(const std::filesystem::path& path);

struct Snapshot {
  Field field;
  double time;
};
/// Header: uint64 n, double L, double time; then n doubles. Little-endian.
void write_snapshot(const Field& f, double time, const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace soliton
