#pragma once

// Runtime monitors built on the weight b(t, x) = sqrt(t^2 + x^2):
//
//   M_b(t)     = integral 2 b_x Im(conj(u) u_x) + |u|^2 b_t dx
//   d/dt M_b   = integral 4 Re(conj(u_x) u_x b_xx) - |u|^2 b_xxxx
//                + (2p/(p+2)) b_xx a |u|^{p+2} - (4/(p+2)) b_x a_x |u|^{p+2}
//                + 4 Im((b_t)_x conj(u) u_x) + |u|^2 b_tt
//   ||u||_Z(t) = || c(t, x) (x + 2it d/dx) u ||_2,   c = [t / (<t>^3 + |x|^3)]^{1/2}
//
// with <t> = sqrt(1 + t^2). In one dimension the angular gradient term vanishes. All
// weighted quantities are defined for t >= 1.

#include <cmath>
#include <limits>
#include <string>

#include "nlsim/exponents.hpp"
#include "nlsim/fft.hpp"
#include "nlsim/model.hpp"
#include "nlsim/ndjson.hpp"
#include "nlsim/norms.hpp"
#include "nlsim/spacetime.hpp"

namespace nlsim {

inline double japanese_bracket(double t) { return std::sqrt(1.0 + t * t); }

namespace detail {

inline void require_weight_regime(double t, const char* where) {
  if (!(t >= 1.0)) throw DomainError(std::string(where) + ": defined for t >= 1, got t = " + std::to_string(t));
}

}  // namespace detail

/// d^4 b / dx^4 for b = sqrt(t^2 + x^2).
inline double bilaplacian_weight(double t, double x) {
  const double b2 = t * t + x * x;
  const double b = std::sqrt(b2);
  return t * t * (12.0 * x * x - 3.0 * t * t) / (b2 * b2 * b2 * b);
}

/// Morawetz quantity M_b(t). Pass du when the spectral derivative is already available.
inline double morawetz_quantity(const Field& u, double t, const Field* du = nullptr) {
  detail::require_weight_regime(t, "morawetz_quantity");
  Field local(u.grid());
  if (!du) {
    local = derivative(u);
    du = &local;
  }
  const auto& g = u.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    const double b = std::hypot(t, x);
    const double im = (std::conj(u[j]) * (*du)[j]).imag();
    acc += 2.0 * (x / b) * im + std::norm(u[j]) * (t / b);
  }
  return acc * g.dx();
}

/// Term-by-term time derivative of the Morawetz quantity.
struct MorawetzDerivative {
  double hessian = 0.0;            // 4 |u_x|^2 b_xx
  double bilaplacian = 0.0;        // -|u|^2 b_xxxx
  double potential = 0.0;          // (2p/(p+2)) b_xx a |u|^{p+2}
  double repulsive = 0.0;          // -(4/(p+2)) b_x a_x |u|^{p+2}
  double mixed = 0.0;              // 4 Im((b_t)_x conj(u) u_x)
  double time_hessian = 0.0;       // |u|^2 b_tt
  double angular = 0.0;            // identically zero in one dimension
  double total = 0.0;
  /// |(x + 2it d/dx) u|^2 / b^3, which equals hessian + mixed + time_hessian.
  double galilean = 0.0;
  /// galilean + potential; nonnegative whenever a >= 0.
  double coercive = 0.0;
};

inline MorawetzDerivative morawetz_derivative(const Field& u, double t, const Inhomogeneity& a, double p,
                                              const Field* du = nullptr) {
  detail::require_weight_regime(t, "morawetz_derivative");
  require_same_grid(u.grid(), a.grid(), "morawetz_derivative");
  Field local(u.grid());
  if (!du) {
    local = derivative(u);
    du = &local;
  }
  const auto& g = u.grid();
  const auto da = a.derivative();
  MorawetzDerivative d;
  const double t2 = t * t;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    const double b2 = t2 + x * x;
    const double b = std::sqrt(b2);
    const double b3 = b2 * b;
    const double bx = x / b;
    const double bxx = t2 / b3;
    const double btt = x * x / b3;
    const double btx = -t * x / b3;
    const cplx uj = u[j];
    const cplx ux = (*du)[j];
    const double u2 = std::norm(uj);
    const double up = std::pow(u2, 0.5 * (p + 2.0));
    d.hessian += 4.0 * std::norm(ux) * bxx;
    d.bilaplacian += -u2 * bilaplacian_weight(t, x);
    d.potential += (2.0 * p / (p + 2.0)) * bxx * a[j] * up;
    d.repulsive += -(4.0 / (p + 2.0)) * bx * da[j] * up;
    d.mixed += 4.0 * btx * (std::conj(uj) * ux).imag();
    d.time_hessian += u2 * btt;
    const cplx J = x * uj + cplx(0.0, 2.0 * t) * ux;
    d.galilean += std::norm(J) / b3;
  }
  const double dx = g.dx();
  d.hessian *= dx;
  d.bilaplacian *= dx;
  d.potential *= dx;
  d.repulsive *= dx;
  d.mixed *= dx;
  d.time_hessian *= dx;
  d.galilean *= dx;
  d.total = d.hessian + d.bilaplacian + d.potential + d.repulsive + d.mixed + d.time_hessian + d.angular;
  d.coercive = d.galilean + d.potential;
  return d;
}

/// c(t, x)^2 = t / (<t>^3 + |x|^3).
inline double z_weight_squared(double t, double x) {
  const double bt = japanese_bracket(t);
  const double ax = std::abs(x);
  return t / (bt * bt * bt + ax * ax * ax);
}

/// ||u||_{Z(t)} with (x + 2it d/dx) applied as pointwise x plus spectral derivative.
inline double z_norm(const Field& u, double t, const Field* du = nullptr) {
  detail::require_weight_regime(t, "z_norm");
  Field local(u.grid());
  if (!du) {
    local = derivative(u);
    du = &local;
  }
  const auto& g = u.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    const cplx J = x * u[j] + cplx(0.0, 2.0 * t) * (*du)[j];
    acc += z_weight_squared(t, x) * std::norm(J);
  }
  return std::sqrt(acc * g.dx());
}

/// The same norm through (x + 2it d/dx) f = e^{ix^2/4t} 2it d/dx [e^{-ix^2/4t} f].
inline double z_norm_galilean(const Field& u, double t) {
  detail::require_weight_regime(t, "z_norm_galilean");
  const auto& g = u.grid();
  Field twisted(g);
  for (std::size_t j = 0; j < g.n(); ++j) twisted[j] = std::polar(1.0, -g.x(j) * g.x(j) / (4.0 * t)) * u[j];
  const Field d = derivative(twisted);
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) acc += z_weight_squared(t, g.x(j)) * 4.0 * t * t * std::norm(d[j]);
  return std::sqrt(acc * g.dx());
}

/// integral <t>^2 a |u|^{p+2} / (<t>^3 + |x|^3) dx.
inline double weighted_potential(const Field& u, double t, const Inhomogeneity& a, double p) {
  require_same_grid(u.grid(), a.grid(), "weighted_potential");
  const auto& g = u.grid();
  const double bt = japanese_bracket(t);
  const double bt3 = bt * bt * bt;
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double ax = std::abs(g.x(j));
    acc += bt * bt * a[j] * std::pow(std::abs(u[j]), p + 2.0) / (bt3 + ax * ax * ax);
  }
  return acc * g.dx();
}

/// Per-sample scalars; weighted quantities are NaN (serialized as null) for t < 1
/// or when disabled.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double h1 = 0.0;
  double morawetz = std::numeric_limits<double>::quiet_NaN();
  double z = std::numeric_limits<double>::quiet_NaN();
  /// integral_1^t Z(s)^2 ds / s
  double z_int = 0.0;
  /// integral_1^t integral <s>^2 a |u|^{p+2} / (<s>^3 + |x|^3) dx ds
  double pot_int = 0.0;
  /// L_t^{2p} L_x^r norm accumulated from the first sample.
  double scat_norm = 0.0;

  std::string to_ndjson() const {
    return NdjsonLine()
        .add("t", t)
        .add("mass", mass)
        .add("energy", energy)
        .add("h1", h1)
        .add("morawetz", morawetz)
        .add("z", z)
        .add("z_int", z_int)
        .add("pot_int", pot_int)
        .add("scat_norm", scat_norm)
        .str();
  }
};

struct DiagnosticsToggles {
  bool morawetz = true;
  bool z_norm = true;
  bool scattering_norm = true;
};

/// Produces DiagnosticsRecords from successive snapshots of one trajectory.
class DiagnosticsMonitor {
 public:
  DiagnosticsMonitor(const Inhomogeneity& a, double p, DiagnosticsToggles toggles = {})
      : a_(&a), p_(p), toggles_(toggles), scattering_(2.0 * p, exponents_for(p).r) {}

  DiagnosticsRecord record(const Field& u) {
    const double t = u.time();
    const Field du = derivative(u);
    DiagnosticsRecord rec;
    rec.t = t;
    rec.mass = mass(u);
    const double grad2 = mass(du);
    rec.h1 = std::sqrt(rec.mass + grad2);
    rec.energy = 0.5 * grad2 + potential_energy(u, *a_, p_);
    if (toggles_.scattering_norm) {
      scattering_.accumulate(t, lebesgue_norm(u, scattering_.r()));
      rec.scat_norm = scattering_.value();
    } else {
      rec.scat_norm = std::numeric_limits<double>::quiet_NaN();
    }
    if (t >= 1.0) {
      if (toggles_.morawetz) rec.morawetz = morawetz_quantity(u, t, &du);
      const double z = z_norm(u, t, &du);
      if (toggles_.z_norm) rec.z = z;
      const double zi = z * z / t;
      const double pi = weighted_potential(u, t, *a_, p_);
      if (have_weighted_) {
        z_int_ += 0.5 * (t - last_t_) * (zi + last_z_integrand_);
        pot_int_ += 0.5 * (t - last_t_) * (pi + last_pot_integrand_);
      }
      have_weighted_ = true;
      last_t_ = t;
      last_z_integrand_ = zi;
      last_pot_integrand_ = pi;
    }
    rec.z_int = z_int_;
    rec.pot_int = pot_int_;
    return rec;
  }

 private:
  const Inhomogeneity* a_;
  double p_;
  DiagnosticsToggles toggles_;
  SpacetimeAccumulator scattering_;
  bool have_weighted_ = false;
  double last_t_ = 0.0;
  double last_z_integrand_ = 0.0;
  double last_pot_integrand_ = 0.0;
  double z_int_ = 0.0;
  double pot_int_ = 0.0;
};

}  // namespace nlsim
