#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nlsim/errors.hpp"

namespace nlsim {

/// Exponents attached to the power p of the nonlinearity.
///
///   r(p)   = p             (p > 4),   4p/(p-2)     (2 < p <= 4)
///   s(p)   = 1/2 - 2/p     (p > 4),   1/4 - 1/(2p) (2 < p <= 4)
///   rho(p) = infinity      (p > 4),   4/(6-p)      (2 < p <= 4)
///   Q(p)   = p             (p > 4),   8p/(p+2)     (2 < p <= 4)
///
/// L_t^{2p} L_x^r is the scattering norm, a and a' are measured in L^rho, and
/// L_t^Q L_x^inf scales like H^s. p = 4 is placed in the lower branch for all four.
struct Exponents {
  double p;
  double r;
  double s;
  double rho;
  double Q;
  /// Interpolation parameter inside the admissible window of the modified nonlinear estimate.
  double theta;
};

/// Lower bound on theta for the modified nonlinear estimate.
inline double interpolation_theta_floor(double p) {
  return p > 4.0 ? 2.0 / p - 1.0 : (5.0 * p - 2.0 - p * p) / (2.0 * p);
}

inline Exponents exponents_for(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) {
    throw DomainError("exponents_for: p must exceed 2 (p = 2 resembles a mass-critical problem and is not supported)");
  }
  Exponents e{};
  e.p = p;
  if (p > 4.0) {
    e.r = p;
    e.s = 0.5 - 2.0 / p;
    e.rho = std::numeric_limits<double>::infinity();
    e.Q = p;
  } else {
    e.r = 4.0 * p / (p - 2.0);
    e.s = 0.25 - 1.0 / (2.0 * p);
    e.rho = 4.0 / (6.0 - p);
    e.Q = 8.0 * p / (p + 2.0);
  }
  const double lo = std::max(0.0, interpolation_theta_floor(p));
  e.theta = 0.5 * (lo + 1.0);
  return e;
}

/// Space-time pair (Q, R) of the modified nonlinear estimate for a given theta.
struct InterpolationPair {
  double Q;
  double R;
};

inline InterpolationPair interpolation_pair(const Exponents& e, double theta) {
  const double p = e.p;
  const double r = e.r;
  return {4.0 * p * (p - 1.0) / ((3.0 - theta) * p - 2.0),
          2.0 * r * (p - 1.0) / (2.0 * (p - 1.0) - r * (1.0 - theta))};
}

inline InterpolationPair interpolation_pair(const Exponents& e) { return interpolation_pair(e, e.theta); }

}  // namespace nlsim
