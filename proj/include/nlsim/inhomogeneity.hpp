#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlsim/expression.hpp"
#include "nlsim/fft.hpp"
#include "nlsim/grid.hpp"

namespace nlsim {

enum class DecayClass { BoundedOnly, IntegrableAndBounded };

inline const char* to_string(DecayClass c) {
  return c == DecayClass::BoundedOnly ? "bounded_only" : "integrable_and_bounded";
}

/// Outcome of checking a sampled a(x) against the admissibility hypotheses.
struct AdmissibilityReport {
  bool finite = true;
  bool nonnegative = true;
  bool repulsive = true;
  bool gradient_vanishes_at_infinity = true;
  DecayClass decay_class = DecayClass::BoundedOnly;
  double a_minus = 0.0;
  double a_plus = 0.0;

  double min_a = 0.0;
  /// max over x != 0 of x a'(x); nonpositive for repulsive a.
  double max_x_da = 0.0;
  double sup_da = 0.0;
  /// max |a'| over the outer 5% of each half-domain.
  double tail_sup_da = 0.0;
  double tail_integral_a = 0.0;
  double tail_integral_da = 0.0;

  /// Sign conditions and gradient decay, independent of p.
  bool hypotheses_hold() const noexcept { return finite && nonnegative && repulsive && gradient_vanishes_at_infinity; }

  /// Case split: p > 4 needs boundedness only, 2 < p <= 4 also needs a, a' in L^1.
  bool admissible_for(double p) const noexcept {
    if (!hypotheses_hold() || !(p > 2.0)) return false;
    return p > 4.0 || decay_class == DecayClass::IntegrableAndBounded;
  }
};

struct ValidationTolerances {
  /// Tail-integral threshold deciding the decay class.
  double tail_integral = 1e-8;
  double nonnegativity = 1e-12;
  /// Repulsivity allows x a'(x) <= repulsivity * sup|a'|.
  double repulsivity = 1e-10;
  /// |a'| on the outer 5% of the box must not exceed gradient_decay * sup|a'|.
  double gradient_decay = 1e-2;
};

/// Sampled inhomogeneity a(x) with its derivative and admissibility report.
class Inhomogeneity {
 public:
  Inhomogeneity(Grid1D grid, std::vector<double> a, std::vector<double> da, std::string description,
                AdmissibilityReport report)
      : grid_(std::move(grid)),
        a_(std::move(a)),
        da_(std::move(da)),
        description_(std::move(description)),
        report_(report) {
    if (a_.size() != grid_.n() || da_.size() != grid_.n()) {
      throw StructuralError("Inhomogeneity: sample count does not match grid");
    }
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return a_; }
  std::span<const double> derivative() const noexcept { return da_; }
  double operator[](std::size_t j) const noexcept { return a_[j]; }
  const std::string& description() const noexcept { return description_; }
  const AdmissibilityReport& report() const noexcept { return report_; }
  bool admissible_for(double p) const noexcept { return report_.admissible_for(p); }
  bool is_zero() const noexcept {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return v == 0.0; });
  }

 private:
  Grid1D grid_;
  std::vector<double> a_;
  std::vector<double> da_;
  std::string description_;
  AdmissibilityReport report_;
};

inline AdmissibilityReport assess(const Grid1D& grid, std::span<const double> a, std::span<const double> da,
                                  const ValidationTolerances& tol = {}) {
  AdmissibilityReport rep;
  const std::size_t n = grid.n();
  const double L = grid.half_length();
  const double dx = grid.dx();

  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(a[j]) || !std::isfinite(da[j])) rep.finite = false;
  }
  rep.min_a = *std::min_element(a.begin(), a.end());
  rep.nonnegative = rep.min_a >= -tol.nonnegativity;

  double sup_da = 0.0;
  for (std::size_t j = 0; j < n; ++j) sup_da = std::max(sup_da, std::abs(da[j]));
  rep.sup_da = sup_da;

  double max_xda = -std::numeric_limits<double>::infinity();
  double tail_sup = 0.0, tail_a = 0.0, tail_da = 0.0;
  double sum_minus = 0.0, sum_plus = 0.0;
  std::size_t cnt_minus = 0, cnt_plus = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(j);
    if (x != 0.0) max_xda = std::max(max_xda, x * da[j]);
    const double ax = std::abs(x);
    if (ax > 0.5 * L) {
      tail_a += std::abs(a[j]) * dx;
      tail_da += std::abs(da[j]) * dx;
    }
    if (ax >= 0.95 * L) {
      tail_sup = std::max(tail_sup, std::abs(da[j]));
      if (x < 0.0) {
        sum_minus += a[j];
        ++cnt_minus;
      } else {
        sum_plus += a[j];
        ++cnt_plus;
      }
    }
  }
  rep.max_x_da = max_xda;
  rep.repulsive = max_xda <= tol.repulsivity * sup_da;
  rep.tail_sup_da = tail_sup;
  rep.gradient_vanishes_at_infinity = sup_da == 0.0 || tail_sup <= tol.gradient_decay * sup_da;
  rep.tail_integral_a = tail_a;
  rep.tail_integral_da = tail_da;
  rep.decay_class = (tail_a < tol.tail_integral && tail_da < tol.tail_integral) ? DecayClass::IntegrableAndBounded
                                                                                 : DecayClass::BoundedOnly;
  rep.a_minus = cnt_minus ? sum_minus / static_cast<double>(cnt_minus) : 0.0;
  rep.a_plus = cnt_plus ? sum_plus / static_cast<double>(cnt_plus) : 0.0;
  return rep;
}

namespace detail {

/// Smooth ramp from `left` to `right` centred at c with width w, and its derivative.
struct Ramp {
  double left, right, c, w;
  double value(double x) const { return left + (right - left) * 0.5 * (1.0 + std::tanh((x - c) / w)); }
  double slope(double x) const {
    const double t = std::tanh((x - c) / w);
    return (right - left) * 0.5 * (1.0 - t * t) / w;
  }
};

}  // namespace detail

/// Spectral derivative of samples whose limits at -L and L may differ: a smooth ramp
/// carries the jump so that the periodic remainder is continuous.
inline std::vector<double> spectral_derivative_nonperiodic(std::span<const double> a, const Grid1D& grid) {
  const std::size_t n = grid.n();
  const detail::Ramp ramp{a[0], a[n - 1], 0.0, grid.half_length() / 16.0};
  std::vector<double> rem(n);
  for (std::size_t j = 0; j < n; ++j) rem[j] = a[j] - ramp.value(grid.x(j));
  auto d = derivative(rem, grid);
  for (std::size_t j = 0; j < n; ++j) d[j] += ramp.slope(grid.x(j));
  return d;
}

/// Validates samples, differentiating them spectrally.
inline Inhomogeneity validate(std::vector<double> a, const Grid1D& grid, double tail_tol = 1e-8,
                              std::string description = "samples") {
  if (a.size() != grid.n()) throw StructuralError("validate: sample count does not match grid");
  auto da = spectral_derivative_nonperiodic(a, grid);
  ValidationTolerances tol;
  tol.tail_integral = tail_tol;
  auto rep = assess(grid, a, da, tol);
  return Inhomogeneity(grid, std::move(a), std::move(da), std::move(description), rep);
}

/// Validates a closed-form a(x); the derivative is exact (forward mode).
inline Inhomogeneity validate(const Expression& expr, const Grid1D& grid, double tail_tol = 1e-8) {
  std::vector<double> a(grid.n()), da(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const auto v = expr.eval(grid.x(j));
    a[j] = v.v;
    da[j] = v.d;
  }
  ValidationTolerances tol;
  tol.tail_integral = tail_tol;
  auto rep = assess(grid, a, da, tol);
  return Inhomogeneity(grid, std::move(a), std::move(da), expr.source(), rep);
}

inline Inhomogeneity constant_inhomogeneity(const Grid1D& grid, double c) {
  std::vector<double> a(grid.n(), c), da(grid.n(), 0.0);
  auto rep = assess(grid, a, da);
  std::ostringstream desc;
  desc << c;
  return Inhomogeneity(grid, std::move(a), std::move(da), desc.str(), rep);
}

/// Band-limited resampling of uniformly spaced (x, a) pairs onto the grid. A tanh ramp
/// between the end values absorbs any difference in the limits; the remainder is
/// interpolated by its trigonometric polynomial and targets outside the sample range
/// take the ramp value.
inline std::vector<double> resample_band_limited(std::vector<std::pair<double, double>> pts, const Grid1D& grid) {
  if (pts.size() < 4) throw StructuralError("resample: need at least 4 samples");
  std::sort(pts.begin(), pts.end());
  const std::size_t m = pts.size();
  const double x0 = pts.front().first;
  const double h = (pts.back().first - x0) / static_cast<double>(m - 1);
  if (!(h > 0.0)) throw StructuralError("resample: sample abscissae must be distinct");
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(pts[i].first - (x0 + static_cast<double>(i) * h)) > 1e-6 * h) {
      throw StructuralError("resample: sample abscissae must be uniformly spaced");
    }
  }
  const double x1 = pts.back().first;
  const detail::Ramp ramp{pts.front().second, pts.back().second, 0.5 * (x0 + x1), (x1 - x0) / 16.0};
  std::vector<double> rem(m);
  for (std::size_t i = 0; i < m; ++i) rem[i] = pts[i].second - ramp.value(pts[i].first);

  const double period = static_cast<double>(m) * h;
  const long half = static_cast<long>(m / 2);
  std::vector<std::complex<double>> coef(m);
  for (std::size_t kk = 0; kk < m; ++kk) {
    const long k = static_cast<long>(kk) - half;
    std::complex<double> c{};
    for (std::size_t i = 0; i < m; ++i) {
      c += rem[i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(i) /
                                        static_cast<double>(m));
    }
    coef[kk] = c / static_cast<double>(m);
  }
  std::vector<double> out(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.x(j);
    double v = ramp.value(x);
    if (x >= x0 && x <= x1) {
      const double phase = 2.0 * std::numbers::pi * (x - x0) / period;
      double s = 0.0;
      for (std::size_t kk = 0; kk < m; ++kk) {
        const long k = static_cast<long>(kk) - half;
        if (m % 2 == 0 && k == -half) {
          s += coef[kk].real() * std::cos(static_cast<double>(k) * phase);
        } else {
          s += (coef[kk] * std::polar(1.0, static_cast<double>(k) * phase)).real();
        }
      }
      v += s;
    }
    out[j] = v;
  }
  return out;
}

/// Reads a two-column text file of (x, a(x)) pairs; '#' starts a comment, commas are allowed.
inline std::vector<std::pair<double, double>> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open inhomogeneity sample file: " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, a;
    if (!(ss >> x)) continue;
    if (!(ss >> a)) throw StructuralError(path + ":" + std::to_string(lineno) + ": expected two columns");
    pts.emplace_back(x, a);
  }
  return pts;
}

inline Inhomogeneity inhomogeneity_from_file(const std::string& path, const Grid1D& grid, double tail_tol = 1e-8) {
  return validate(resample_band_limited(read_sample_file(path), grid), grid, tail_tol, "file:" + path);
}

}  // namespace nlsim
