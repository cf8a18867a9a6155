#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "nlsim/norms.hpp"

namespace nlsim {

/// Running L_t^q L_x^r norm over a stream of time-stamped fields (trapezoid rule in t).
class SpacetimeAccumulator {
 public:
  SpacetimeAccumulator(double q, double r) : q_(q), r_(r) {
    if (!(q >= 1.0) || std::isinf(q)) throw DomainError("SpacetimeAccumulator: q must lie in [1, inf)");
    if (!(r >= 1.0)) throw DomainError("SpacetimeAccumulator: r must lie in [1, inf]");
  }

  double q() const noexcept { return q_; }
  double r() const noexcept { return r_; }

  /// Adds a sample; timestamps must be nondecreasing.
  void accumulate(const Field& field) { accumulate(field.time(), lebesgue_norm(field, r_)); }

  /// Adds a precomputed spatial norm ||u(t)||_r.
  void accumulate(double t, double spatial_norm) {
    if (!std::isfinite(t)) throw StructuralError("SpacetimeAccumulator: non-finite timestamp");
    const double v = std::pow(spatial_norm, q_);
    if (last_t_) {
      if (t < *last_t_) {
        throw StructuralError("SpacetimeAccumulator: timestamps must be nondecreasing (" + std::to_string(t) +
                              " after " + std::to_string(*last_t_) + ")");
      }
      integral_ += 0.5 * (t - *last_t_) * (v + last_v_);
    } else {
      first_t_ = t;
    }
    last_t_ = t;
    last_v_ = v;
  }

  /// (integral ||u||_r^q dt)^{1/q} over the samples seen so far.
  double value() const { return std::pow(integral_, 1.0 / q_); }
  double integral() const noexcept { return integral_; }
  double span() const noexcept { return last_t_ ? *last_t_ - first_t_ : 0.0; }

 private:
  double q_;
  double r_;
  double integral_ = 0.0;
  double first_t_ = 0.0;
  std::optional<double> last_t_;
  double last_v_ = 0.0;
};

}  // namespace nlsim
