#pragma once

#include <cmath>

#include "nlsim/exponents.hpp"
#include "nlsim/fft.hpp"
#include "nlsim/inhomogeneity.hpp"
#include "nlsim/norms.hpp"

namespace nlsim {

/// Pointwise a(x) |u|^p u.
inline Field nonlinearity(const Field& u, const Inhomogeneity& a, double p) {
  require_same_grid(u.grid(), a.grid(), "nonlinearity");
  Field out(u.grid(), u.time());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = a[j] * std::pow(std::abs(u[j]), p) * u[j];
  return out;
}

/// M(u) = integral |u|^2 dx.
inline double mass(const Field& u) {
  double acc = 0.0;
  for (const auto& z : u.samples()) acc += std::norm(z);
  return acc * u.grid().dx();
}

/// (1/2) integral |u_x|^2 dx, derivative taken spectrally.
inline double kinetic_energy(const Field& u) {
  const Field du = derivative(u);
  return 0.5 * mass(du);
}

/// integral a |u|^{p+2} / (p+2) dx.
inline double potential_energy(const Field& u, const Inhomogeneity& a, double p) {
  require_same_grid(u.grid(), a.grid(), "potential_energy");
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += a[j] * std::pow(std::abs(u[j]), p + 2.0);
  return acc * u.grid().dx() / (p + 2.0);
}

/// E(u) = integral (1/2)|u_x|^2 + a |u|^{p+2}/(p+2) dx.
inline double energy(const Field& u, const Inhomogeneity& a, double p) {
  require_same_grid(u.grid(), a.grid(), "energy");
  return kinetic_energy(u) + potential_energy(u, a, p);
}

}  // namespace nlsim
