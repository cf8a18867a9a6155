#pragma once

// Concentration-compactness numerics on finite sequences of fields:
//
//   refined Sobolev ratio  ||f||_r / (sup_N ||P_N f||_r^theta ||f||_{H^1}^{1-theta})
//   bubble extraction      f_n ~ e^{-i t_n Delta} phi(. - x_n) + w_n
//   decoupling residuals   mass and energy Pythagorean defects, parameter separations
//
// Bubble parameters follow g_n = e^{i t_n Delta} f_n(. + x_n) -> phi, so each extracted
// component is e^{-i t_n Delta} phi(. - x_n). No rescaling is applied; the detection
// frequency is recorded as the bubble scale.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsim/checkpoint_io.hpp"
#include "nlsim/exponents.hpp"
#include "nlsim/littlewood_paley.hpp"
#include "nlsim/model.hpp"
#include "nlsim/norms.hpp"
#include "nlsim/propagator.hpp"

namespace nlsim {

/// theta(r) = (r-2)/r for 2 < r <= 4; for r > 4 the L^4 value 1/2 composed with the
/// Gagliardo-Nirenberg exponent 2/3 + 4/(3r).
inline double refined_sobolev_theta(double r) {
  if (!(r > 2.0) || !std::isfinite(r)) throw DomainError("refined_sobolev_theta: need 2 < r < inf");
  return r <= 4.0 ? (r - 2.0) / r : 0.5 * (2.0 / 3.0 + 4.0 / (3.0 * r));
}

struct RefinedSobolevResult {
  bool applicable = false;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double theta = 0.0;
  double sup_piece = 0.0;
  double sup_scale = 0.0;
};

/// theta < 0 selects refined_sobolev_theta(r).
inline RefinedSobolevResult refined_sobolev_ratio(const Field& f, double r, double theta = -1.0) {
  RefinedSobolevResult res;
  res.theta = theta < 0.0 ? refined_sobolev_theta(r) : theta;
  if (!(r > 2.0)) throw DomainError("refined_sobolev_ratio: r must exceed 2");
  const double h1 = h1_norm(f);
  if (h1 == 0.0) return res;
  for (const auto& [N, piece] : littlewood_paley_pieces(f)) {
    const double v = lebesgue_norm(piece, r);
    if (v > res.sup_piece) {
      res.sup_piece = v;
      res.sup_scale = N;
    }
  }
  res.applicable = true;
  res.ratio = lebesgue_norm(f, r) / (std::pow(res.sup_piece, res.theta) * std::pow(h1, 1.0 - res.theta));
  return res;
}

struct ProfileOptions {
  double p = 3.0;
  /// Half-width of the sampled time window for the t_n search.
  double time_window = 10.0;
  double time_step = 0.05;
  /// Sequences whose max_n sup_t ||e^{itDelta}f_n||_r stays below this have no bubble.
  double detection_threshold = 1e-3;
  /// Smooth localization of the recentred average: 1 on |x| <= radius, 0 beyond outer_radius.
  double window_radius = 10.0;
  double window_outer_radius = 15.0;
  /// Frequencies up to 2^octaves times the upper edge 2M of the detection annulus are kept.
  double truncation_octaves = 2.0;
  std::size_t max_bubbles = 4;
};

struct Bubble {
  Field phi;
  std::vector<double> t_shift;
  std::vector<double> x_shift;
  /// Dyadic frequency of detection (mode over the sequence).
  double scale = 0.0;

  /// e^{-i t_n Delta} phi(. - x_n).
  Field component(std::size_t n) const { return free_evolve(translate(phi, x_shift[n]), -t_shift[n]); }
};

struct ExtractionResult {
  explicit ExtractionResult(const Grid1D& g) : bubble{Field(g), {}, {}, 0.0} {}

  bool found = false;
  std::string status;
  Bubble bubble;
  std::vector<Field> residuals;
  /// A = mean ||f_n||_{H^1}, eps = mean sup_t ||e^{itDelta} f_n||_{L^r} over the window.
  double A = 0.0;
  double eps = 0.0;
  double phi_h1 = 0.0;
  /// Exponent alpha = 1/(theta_1 theta_2) and fitted kappa in ||phi||_{H^1} >= kappa A (eps/A)^alpha.
  double alpha = 0.0;
  double kappa = 0.0;
  std::vector<double> scales;
};

namespace detail {

inline double smooth_window(double x, double r0, double r1) {
  const double a = std::abs(x);
  if (a <= r0) return 1.0;
  if (a >= r1) return 0.0;
  return 1.0 - lp::smooth_step((a - r0) / (r1 - r0));
}

inline void require_sequence(const std::vector<Field>& seq, std::size_t min_len, const char* where) {
  if (seq.size() < min_len) {
    throw StructuralError(std::string(where) + ": need at least " + std::to_string(min_len) + " elements");
  }
  for (const auto& f : seq) require_same_grid(f.grid(), seq.front().grid(), where);
}

}  // namespace detail

/// theta_1 = (p(r-2) - 2r) / (p(r-2)).
inline double strichartz_interpolation_theta(double p) {
  const double r = exponents_for(p).r;
  return (p * (r - 2.0) - 2.0 * r) / (p * (r - 2.0));
}

/// One inverse-Strichartz extraction step over the sequence.
inline ExtractionResult extract_bubble(const std::vector<Field>& seq, const ProfileOptions& opt = {}) {
  detail::require_sequence(seq, 4, "extract_bubble");
  const auto ex = exponents_for(opt.p);
  const double r = ex.r;
  const auto& g = seq.front().grid();
  ExtractionResult res(g);
  const auto steps = static_cast<long>(std::llround(opt.time_window / opt.time_step));

  std::vector<Field> recentred;
  double max_eps = 0.0;
  for (const auto& f : seq) {
    const FreeFlow flow(f);
    double best_t = 0.0, best = -1.0;
    for (long i = -steps; i <= steps; ++i) {
      const double t = static_cast<double>(i) * opt.time_step;
      const double v = lebesgue_norm(flow.at(t), r);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    res.A += h1_norm(f);
    res.eps += best;
    max_eps = std::max(max_eps, best);
    Field ft = flow.at(best_t);
    ft.set_time(0.0);
    double bestN = 0.0, bestPiece = -1.0;
    Field bestField(g);
    for (auto& [N, piece] : littlewood_paley_pieces(ft)) {
      const double v = lebesgue_norm(piece, r);
      if (v > bestPiece) {
        bestPiece = v;
        bestN = N;
        bestField = std::move(piece);
      }
    }
    std::size_t jmax = 0;
    for (std::size_t j = 1; j < g.n(); ++j) {
      if (std::abs(bestField[j]) > std::abs(bestField[jmax])) jmax = j;
    }
    const double xn = g.x(jmax);
    res.bubble.t_shift.push_back(best_t);
    res.bubble.x_shift.push_back(xn);
    res.scales.push_back(bestN);
    recentred.push_back(translate(ft, -xn));
  }
  const double count = static_cast<double>(seq.size());
  res.A /= count;
  res.eps /= count;
  if (max_eps < opt.detection_threshold) {
    res.status = "no bubble";
    res.residuals = seq;
    return res;
  }

  // most frequent detection scale
  std::vector<double> sorted = res.scales;
  std::sort(sorted.begin(), sorted.end());
  std::size_t best_run = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t k = i;
    while (k < sorted.size() && sorted[k] == sorted[i]) ++k;
    if (k - i > best_run) {
      best_run = k - i;
      res.bubble.scale = sorted[i];
    }
    i = k;
  }

  // weak-limit surrogate: mean of the late half, localized, high frequencies truncated
  const std::size_t first = seq.size() / 2;
  Field avg(g);
  for (std::size_t n = first; n < seq.size(); ++n) avg += recentred[n];
  avg *= cplx(1.0 / static_cast<double>(seq.size() - first));
  for (std::size_t j = 0; j < g.n(); ++j) {
    avg[j] *= detail::smooth_window(g.x(j), opt.window_radius, opt.window_outer_radius);
  }
  const double cutoff = 2.0 * res.bubble.scale * std::exp2(opt.truncation_octaves);
  res.bubble.phi = apply_multiplier(avg, [&](double k, std::size_t) { return lp::low_pass_symbol(k, cutoff); });
  res.phi_h1 = h1_norm(res.bubble.phi);
  if (res.phi_h1 <= opt.detection_threshold) {
    res.status = "no bubble";
    res.residuals = seq;
    return res;
  }
  res.found = true;
  res.status = "bubble";
  for (std::size_t n = 0; n < seq.size(); ++n) {
    Field w = seq[n] - res.bubble.component(n);
    w.set_time(seq[n].time());
    res.residuals.push_back(std::move(w));
  }
  const double theta1 = strichartz_interpolation_theta(opt.p);
  const double theta2 = refined_sobolev_theta(r);
  res.alpha = 1.0 / (theta1 * theta2);
  if (res.A > 0.0 && res.eps > 0.0) res.kappa = res.phi_h1 / (res.A * std::pow(res.eps / res.A, res.alpha));
  return res;
}

/// L_t^{2p} L_x^r norm of e^{itDelta} f over the sampled window [-T, T] (trapezoid in t).
inline double windowed_strichartz_norm(const Field& f, const ProfileOptions& opt = {}) {
  const auto ex = exponents_for(opt.p);
  const FreeFlow flow(f);
  SpacetimeAccumulator acc(2.0 * opt.p, ex.r);
  const auto steps = static_cast<long>(std::llround(opt.time_window / opt.time_step));
  for (long i = -steps; i <= steps; ++i) {
    const double t = static_cast<double>(i) * opt.time_step;
    acc.accumulate(t, lebesgue_norm(flow.at(t), ex.r));
  }
  return acc.value();
}

struct DecouplingReport {
  std::vector<double> mass_residual;
  std::vector<double> energy_residual;
  /// Per element, min over pairs j != k of |t_n^j - t_n^k| + |x_n^j - x_n^k| (NaN for one bubble).
  std::vector<double> min_separation;
  double max_mass_residual = 0.0;
  double max_energy_residual = 0.0;
  double max_mass = 0.0;

  nlohmann::json to_json() const {
    auto arr = [](const std::vector<double>& v) {
      nlohmann::json a = nlohmann::json::array();
      for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
      return a;
    };
    return {{"mass_residual", arr(mass_residual)},
            {"energy_residual", arr(energy_residual)},
            {"min_separation", arr(min_separation)},
            {"max_mass_residual", max_mass_residual},
            {"max_energy_residual", max_energy_residual}};
  }
};

/// |M(f_n) - sum_j M(phi^j) - M(w_n)| and |E(f_n) - sum_j E(phi^j_n) - E(w_n)| with
/// phi^j_n the j-th extracted component of f_n.
inline DecouplingReport decoupling_check(const std::vector<Field>& seq, const std::vector<Bubble>& bubbles,
                                         const std::vector<Field>& remainders, const Inhomogeneity& a, double p) {
  if (remainders.size() != seq.size()) throw StructuralError("decoupling_check: remainder count mismatch");
  for (const auto& b : bubbles) {
    if (b.t_shift.size() != seq.size() || b.x_shift.size() != seq.size()) {
      throw StructuralError("decoupling_check: bubble parameter count mismatch");
    }
  }
  DecouplingReport rep;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    require_same_grid(seq[n].grid(), remainders[n].grid(), "decoupling_check");
    double m = mass(seq[n]) - mass(remainders[n]);
    double e = energy(seq[n], a, p) - energy(remainders[n], a, p);
    for (const auto& b : bubbles) {
      const Field c = b.component(n);
      m -= mass(b.phi);
      e -= energy(c, a, p);
    }
    rep.mass_residual.push_back(std::abs(m));
    rep.energy_residual.push_back(std::abs(e));
    rep.max_mass_residual = std::max(rep.max_mass_residual, std::abs(m));
    rep.max_energy_residual = std::max(rep.max_energy_residual, std::abs(e));
    rep.max_mass = std::max(rep.max_mass, mass(seq[n]));
    double sep = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < bubbles.size(); ++j) {
      for (std::size_t k = j + 1; k < bubbles.size(); ++k) {
        const double s = std::abs(bubbles[j].t_shift[n] - bubbles[k].t_shift[n]) +
                         std::abs(bubbles[j].x_shift[n] - bubbles[k].x_shift[n]);
        sep = std::isnan(sep) ? s : std::min(sep, s);
      }
    }
    rep.min_separation.push_back(sep);
  }
  return rep;
}

struct DecompositionReport {
  std::vector<Bubble> bubbles;
  std::vector<ExtractionResult> steps;
  std::vector<Field> remainders;
  DecouplingReport decoupling;
  /// max_n of the windowed Strichartz norm of the remainders relative to the originals.
  double remainder_norm_ratio = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json bs = nlohmann::json::array();
    for (std::size_t j = 0; j < bubbles.size(); ++j) {
      const auto& b = bubbles[j];
      const auto& s = steps[j];
      bs.push_back({{"scale", b.scale},
                    {"t_shift", b.t_shift},
                    {"x_shift", b.x_shift},
                    {"phi_h1", s.phi_h1},
                    {"phi_mass", mass(b.phi)},
                    {"A", s.A},
                    {"eps", s.eps},
                    {"alpha", s.alpha},
                    {"kappa", s.kappa}});
    }
    return {{"check", "profile_decomposition"},
            {"bubbles", bs},
            {"decoupling", decoupling.to_json()},
            {"remainder_norm_ratio", remainder_norm_ratio}};
  }
};

/// Repeated extraction until "no bubble" or opt.max_bubbles.
inline DecompositionReport decompose(const std::vector<Field>& seq, const Inhomogeneity& a,
                                     const ProfileOptions& opt = {}) {
  detail::require_sequence(seq, 4, "decompose");
  DecompositionReport rep;
  rep.remainders = seq;
  for (std::size_t j = 0; j < opt.max_bubbles; ++j) {
    auto step = extract_bubble(rep.remainders, opt);
    if (!step.found) break;
    rep.remainders = step.residuals;
    rep.bubbles.push_back(step.bubble);
    rep.steps.push_back(std::move(step));
  }
  rep.decoupling = decoupling_check(seq, rep.bubbles, rep.remainders, a, opt.p);
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const double base = windowed_strichartz_norm(seq[n], opt);
    if (base > 0.0) rep.remainder_norm_ratio = std::max(rep.remainder_norm_ratio, windowed_strichartz_norm(rep.remainders[n], opt) / base);
  }
  return rep;
}

}  // namespace nlsim
