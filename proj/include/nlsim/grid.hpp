#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nlsim/errors.hpp"

namespace nlsim {

using cplx = std::complex<double>;

/// Periodic grid on [-L, L) with n points and the symmetric wavenumber lattice
/// k_j = (pi/L) j, j in {-n/2, ..., n/2 - 1}.
///
/// Wavenumbers are stored in transform order: index j holds j for j < n/2 and
/// j - n otherwise, so index n/2 is the single Nyquist mode -n/2.
class Grid1D {
 public:
  Grid1D(std::size_t n, double half_length) : n_(n), half_length_(half_length) {
    if (n < 16 || (n & (n - 1)) != 0) {
      throw DomainError("Grid1D: n must be a power of two >= 16, got " + std::to_string(n));
    }
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
      throw DomainError("Grid1D: half length must be positive and finite");
    }
    dx_ = 2.0 * half_length_ / static_cast<double>(n_);
    auto x = std::make_shared<std::vector<double>>(n_);
    auto k = std::make_shared<std::vector<double>>(n_);
    auto k_eff = std::make_shared<std::vector<double>>(n_);
    const double k0 = std::numbers::pi / half_length_;
    for (std::size_t j = 0; j < n_; ++j) {
      (*x)[j] = -half_length_ + static_cast<double>(j) * dx_;
      const auto m = signed_index(j);
      (*k)[j] = k0 * static_cast<double>(m);
      (*k_eff)[j] = (j == n_ / 2) ? 0.0 : (*k)[j];
    }
    x_ = std::move(x);
    k_ = std::move(k);
    k_eff_ = std::move(k_eff);
  }

  std::size_t n() const noexcept { return n_; }
  double half_length() const noexcept { return half_length_; }
  double length() const noexcept { return 2.0 * half_length_; }
  double dx() const noexcept { return dx_; }
  /// Lattice spacing pi/L of the dual grid.
  double dk() const noexcept { return std::numbers::pi / half_length_; }
  /// Largest resolvable |k| (the Nyquist magnitude).
  double k_max() const noexcept { return dk() * static_cast<double>(n_ / 2); }
  std::size_t nyquist_index() const noexcept { return n_ / 2; }

  std::span<const double> x() const noexcept { return *x_; }
  double x(std::size_t j) const noexcept { return (*x_)[j]; }
  std::span<const double> wavenumbers() const noexcept { return *k_; }
  double wavenumber(std::size_t j) const noexcept { return (*k_)[j]; }
  /// Wavenumbers with the Nyquist entry zeroed; used by every derivative multiplier.
  std::span<const double> derivative_wavenumbers() const noexcept { return *k_eff_; }

  long signed_index(std::size_t j) const noexcept {
    return j < n_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_);
  }

  friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
    return a.n_ == b.n_ && a.half_length_ == b.half_length_;
  }

 private:
  std::size_t n_;
  double half_length_;
  double dx_{};
  std::shared_ptr<const std::vector<double>> x_;
  std::shared_ptr<const std::vector<double>> k_;
  std::shared_ptr<const std::vector<double>> k_eff_;
};

inline void require_same_grid(const Grid1D& a, const Grid1D& b, const char* where) {
  if (!(a == b)) throw StructuralError(std::string(where) + ": grid mismatch");
}

/// Complex samples u(t, x_j) on a grid.
class Field {
 public:
  explicit Field(Grid1D grid, double t = 0.0)
      : grid_(std::move(grid)), samples_(grid_.n(), cplx{}), t_(t) {}

  Field(Grid1D grid, std::vector<cplx> samples, double t = 0.0)
      : grid_(std::move(grid)), samples_(std::move(samples)), t_(t) {
    if (samples_.size() != grid_.n()) {
      throw StructuralError("Field: sample count " + std::to_string(samples_.size()) +
                            " does not match grid size " + std::to_string(grid_.n()));
    }
  }

  /// Samples f(x_j) for a callable f(x) -> complex.
  template <class F>
  static Field from_function(const Grid1D& grid, F&& f, double t = 0.0) {
    std::vector<cplx> s(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) s[j] = cplx(f(grid.x(j)));
    return Field(grid, std::move(s), t);
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const cplx> samples() const noexcept { return samples_; }
  std::span<cplx> samples() noexcept { return samples_; }
  std::vector<cplx>& data() noexcept { return samples_; }
  const std::vector<cplx>& data() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  cplx operator[](std::size_t j) const noexcept { return samples_[j]; }
  cplx& operator[](std::size_t j) noexcept { return samples_[j]; }

  double time() const noexcept { return t_; }
  void set_time(double t) noexcept { t_ = t; }

  bool all_finite() const noexcept {
    for (const auto& z : samples_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
  }

  Field& operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator+=");
    for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] += o.samples_[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator-=");
    for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] -= o.samples_[j];
    return *this;
  }
  Field& operator*=(cplx s) noexcept {
    for (auto& z : samples_) z *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx s, Field a) { return a *= s; }

 private:
  Grid1D grid_;
  std::vector<cplx> samples_;
  double t_;
};

/// Fourier coefficients in transform order, normalized so that
/// modes[j] approximates (2 pi)^{-1/2} * integral u(x) e^{-i k_j x} dx.
class Spectrum {
 public:
  explicit Spectrum(Grid1D grid) : grid_(std::move(grid)), modes_(grid_.n(), cplx{}) {}
  Spectrum(Grid1D grid, std::vector<cplx> modes) : grid_(std::move(grid)), modes_(std::move(modes)) {
    if (modes_.size() != grid_.n()) throw StructuralError("Spectrum: mode count does not match grid");
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const cplx> modes() const noexcept { return modes_; }
  std::span<cplx> modes() noexcept { return modes_; }
  std::vector<cplx>& data() noexcept { return modes_; }
  cplx operator[](std::size_t j) const noexcept { return modes_[j]; }
  cplx& operator[](std::size_t j) noexcept { return modes_[j]; }
  std::size_t size() const noexcept { return modes_.size(); }

  /// sqrt(dk * sum |modes|^2); equals the L2 norm of the source field.
  double l2_norm() const noexcept {
    double s = 0.0;
    for (const auto& z : modes_) s += std::norm(z);
    return std::sqrt(grid_.dk() * s);
  }

 private:
  Grid1D grid_;
  std::vector<cplx> modes_;
};

}  // namespace nlsim
