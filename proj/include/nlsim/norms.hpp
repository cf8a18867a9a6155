#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nlsim/fft.hpp"
#include "nlsim/grid.hpp"

namespace nlsim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Discrete L^r norm (dx * sum |u|^r)^{1/r}; r = infinity gives max |u|.
inline double lebesgue_norm(const Field& field, double r) {
  if (std::isnan(r) || r < 1.0) throw DomainError("lebesgue_norm: r must lie in [1, inf], got " + std::to_string(r));
  const auto s = field.samples();
  if (std::isinf(r)) {
    double m = 0.0;
    for (const auto& z : s) m = std::max(m, std::abs(z));
    return m;
  }
  if (r == 2.0) {
    double acc = 0.0;
    for (const auto& z : s) acc += std::norm(z);
    return std::sqrt(field.grid().dx() * acc);
  }
  // scale by the sup to keep |u|^r representable for large r
  double m = 0.0;
  for (const auto& z : s) m = std::max(m, std::abs(z));
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  for (const auto& z : s) acc += std::pow(std::abs(z) / m, r);
  return m * std::pow(field.grid().dx() * acc, 1.0 / r);
}

inline double l2_norm(const Field& field) { return lebesgue_norm(field, 2.0); }

/// Real part of the L2 inner product  integral conj(u) v dx.
inline cplx inner_product(const Field& u, const Field& v) {
  require_same_grid(u.grid(), v.grid(), "inner_product");
  cplx acc{};
  for (std::size_t j = 0; j < u.size(); ++j) acc += std::conj(u[j]) * v[j];
  return acc * u.grid().dx();
}

enum class SobolevKind { Inhomogeneous, Homogeneous };

/// H^s norm with multiplier (1 + k^2)^{s/2}, or the homogeneous |k|^s variant.
/// The Nyquist mode is treated as k = 0, matching the derivative multipliers.
inline double sobolev_norm(const Field& field, double s, SobolevKind kind = SobolevKind::Inhomogeneous) {
  const Spectrum spec = transform(field);
  const auto keff = field.grid().derivative_wavenumbers();
  double acc = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double k2 = keff[j] * keff[j];
    double w;
    if (kind == SobolevKind::Inhomogeneous) {
      w = std::pow(1.0 + k2, s);
    } else {
      w = (k2 == 0.0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(k2, s);
    }
    acc += w * std::norm(spec[j]);
  }
  return std::sqrt(field.grid().dk() * acc);
}

inline double h1_norm(const Field& field) { return sobolev_norm(field, 1.0); }

/// Fraction of the mass carried by |x| > fraction * L.
inline double boundary_mass_fraction(const Field& field, double fraction = 0.9) {
  const auto& g = field.grid();
  double total = 0.0, outer = 0.0;
  const double edge = fraction * g.half_length();
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double m = std::norm(field[j]);
    total += m;
    if (std::abs(g.x(j)) > edge) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace nlsim
