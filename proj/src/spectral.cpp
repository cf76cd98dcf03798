#include "soliton/spectral.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

namespace soliton {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe, execution with the new-array interface
// is. Plans are created once per size under a lock and never destroyed.
struct Plans {
  fftw_plan r2c;
  fftw_plan c2r;
};

const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int ni = static_cast<int>(n);
  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  // ESTIMATE keeps plans (and therefore results) deterministic run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p{fftw_plan_dft_r2c_1d(ni, real, cplx, flags), fftw_plan_dft_c2r_1d(ni, cplx, real, flags)};
  fftw_free(real);
  fftw_free(cplx);
  return cache.emplace(n, p).first->second;
}

// Phase e^{-i k_j tau} computed from the reduced fraction tau/L.
std::complex<double> shift_phase(std::size_t j, double frac) {
  const double turns = std::fmod(static_cast<double>(j) * frac, 1.0);
  const double angle = -2.0 * std::numbers::pi * turns;
  return {std::cos(angle), std::sin(angle)};
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  if (!is) throw IoError("snapshot truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

Grid::Grid(std::size_t n, double length) : n_(n), length_(length) {
  if (n < 64 || !is_power_of_two(n)) throw DomainError("grid size must be a power of two >= 64");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("grid length must be positive");
  wavenumbers_.resize(modes());
  for (std::size_t j = 0; j < modes(); ++j)
    wavenumbers_[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / length_;
}

std::vector<double> Grid::full_wavenumbers() const {
  std::vector<double> k(n_);
  const double base = 2.0 * std::numbers::pi / length_;
  for (std::size_t j = 0; j < n_; ++j) {
    const auto signed_j = j < n_ / 2 ? static_cast<double>(j)
                                     : static_cast<double>(j) - static_cast<double>(n_);
    k[j] = base * signed_j;
  }
  return k;
}

GridPtr make_grid(std::size_t n, double length) { return std::make_shared<const Grid>(n, length); }

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw DomainError("field needs a grid");
  values_.assign(grid_->n(), 0.0);
}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("field needs a grid");
  if (values_.size() != grid_->n()) throw DomainError("field length does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("field values must be finite");
}

Field Field::sample(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid->n());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->x(j));
  return Field(std::move(grid), std::move(v));
}

bool Field::same_grid(const Field& other) const {
  return grid_ == other.grid_ || *grid_ == *other.grid_;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.same_grid(b)) throw DomainError("fields live on different grids");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

Spectrum forward(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.n()) throw DomainError("transform input length does not match grid");
  std::vector<double> in(values.begin(), values.end());
  Spectrum out(grid.modes());
  fftw_execute_dft_r2c(plans_for(grid.n()).r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Spectrum forward(const Field& f) { return forward(f.grid(), f.values()); }

std::vector<double> inverse(const Grid& grid, const Spectrum& spectrum) {
  if (spectrum.size() != grid.modes()) throw DomainError("spectrum length does not match grid");
  Spectrum in = spectrum;  // c2r destroys its input
  std::vector<double> out(grid.n());
  fftw_execute_dft_c2r(plans_for(grid.n()).c2r, reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(grid.n());
  for (double& v : out) v *= scale;
  return out;
}

void apply_derivative(const Grid& grid, Spectrum& spectrum, int order) {
  if (order < 1 || order > 3) throw DomainError("derivative order must be 1, 2 or 3");
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    const double k = grid.wavenumber(j);
    switch (order) {
      case 1: spectrum[j] *= std::complex<double>(0.0, k); break;
      case 2: spectrum[j] *= -k * k; break;
      case 3: spectrum[j] *= std::complex<double>(0.0, -k * k * k); break;
    }
  }
  if (order % 2 == 1) spectrum[grid.nyquist()] = 0.0;
}

Field derivative(const Field& f, int order) {
  Spectrum s = forward(f);
  apply_derivative(f.grid(), s, order);
  return Field(f.grid_ptr(), inverse(f.grid(), s));
}

void apply_translation(const Grid& grid, Spectrum& spectrum, double tau) {
  double frac = tau / grid.length();
  frac -= std::floor(frac);
  for (std::size_t j = 1; j < grid.nyquist(); ++j) spectrum[j] *= shift_phase(j, frac);
  // The Nyquist coefficient of a real field is real; keep the real part of its phase.
  spectrum[grid.nyquist()] *= shift_phase(grid.nyquist(), frac).real();
}

Field translate(const Field& f, double tau) {
  Spectrum s = forward(f);
  apply_translation(f.grid(), s, tau);
  return Field(f.grid_ptr(), inverse(f.grid(), s));
}

std::size_t dealias_cutoff(const Grid& grid) {
  // Largest j with k_j <= (2/3) k_max is floor(n/3).
  return grid.n() / 3 + 1;
}

Spectrum dealias(const Grid& grid, Spectrum spectrum) {
  for (std::size_t j = dealias_cutoff(grid); j < spectrum.size(); ++j) spectrum[j] = 0.0;
  return spectrum;
}

Spectrum band_limit(const Grid& grid, Spectrum spectrum, double fraction) {
  const double kcut = fraction * grid.k_max();
  for (std::size_t j = 0; j < spectrum.size(); ++j)
    if (grid.wavenumber(j) > kcut) spectrum[j] = 0.0;
  return spectrum;
}

void write_csv(const Field& f, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.precision(17);
  os << "x,u\n";
  for (std::size_t j = 0; j < f.size(); ++j) os << f.grid().x(j) << ',' << f[j] << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

Field read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  if (line != "x,u") throw IoError("unexpected CSV header in " + path.string());
  std::vector<double> xs, us;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("malformed CSV row in " + path.string());
    xs.push_back(std::stod(line.substr(0, comma)));
    us.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw IoError("CSV field too short: " + path.string());
  const double n = static_cast<double>(xs.size());
  const double length = n * xs.back() / (n - 1.0);
  return Field(make_grid(xs.size(), length), std::move(us));
}

void write_snapshot(const Field& f, double time, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  put_u64(os, f.size());
  put_f64(os, f.grid().length());
  put_f64(os, time);
  for (double v : f.values()) put_f64(os, v);
  if (!os) throw IoError("write failed: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const auto n = get_u64(is);
  const double length = get_f64(is);
  const double time = get_f64(is);
  if (n > (std::uint64_t{1} << 30)) throw IoError("snapshot header is corrupt");
  std::vector<double> v(n);
  for (auto& x : v) x = get_f64(is);
  return {Field(make_grid(n, length), std::move(v)), time};
}

}  // namespace soliton
