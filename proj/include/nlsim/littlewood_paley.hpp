#pragma once

// Smooth dyadic frequency projections.
//
// P_{<=N} has multiplier chi(|k|/N): 1 on [0, N], 0 beyond 2N, and in between
// cos^2((pi/2) * sigma(|k|/N - 1)) where sigma is the C-infinity step
// exp(-1/s) / (exp(-1/s) + exp(-1/(1-s))). P_N = P_{<=N} - P_{<=N/2}, except at the
// bottom of the resolvable band where P_{N_min} = P_{<=N_min} absorbs the zero mode.

#include <cmath>
#include <numbers>
#include <vector>

#include "nlsim/fft.hpp"
#include "nlsim/grid.hpp"

namespace nlsim {

namespace lp {

inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

/// Multiplier of P_{<=N} at wavenumber k.
inline double low_pass_symbol(double k, double N) {
  const double q = std::abs(k) / N;
  if (q <= 1.0) return 1.0;
  if (q >= 2.0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * smooth_step(q - 1.0));
  return c * c;
}

inline bool is_dyadic(double N) {
  if (!(N > 0.0) || !std::isfinite(N)) return false;
  const double e = std::log2(N);
  return std::abs(e - std::round(e)) < 1e-9;
}

/// Smallest dyadic block: the largest power of two not exceeding the lattice spacing.
inline double band_min(const Grid1D& g) { return std::exp2(std::floor(std::log2(g.dk()))); }
/// Largest dyadic block: the smallest power of two with P_{<=N} equal to the identity.
inline double band_max(const Grid1D& g) { return std::exp2(std::ceil(std::log2(g.k_max()))); }

/// Dyadic frequencies N_min, 2 N_min, ..., N_max of the resolvable band.
inline std::vector<double> dyadic_band(const Grid1D& g) {
  std::vector<double> out;
  const double hi = band_max(g);
  for (double N = band_min(g); N <= hi * (1.0 + 1e-12); N *= 2.0) out.push_back(N);
  return out;
}

inline bool in_band(const Grid1D& g, double N) {
  return is_dyadic(N) && N >= band_min(g) * (1.0 - 1e-12) && N <= band_max(g) * (1.0 + 1e-12);
}

/// Multiplier of the annular block P_N, with the bottom-of-band convention above.
inline double annulus_symbol(const Grid1D& g, double k, double N) {
  if (N <= band_min(g) * (1.0 + 1e-12)) return low_pass_symbol(k, N);
  return low_pass_symbol(k, N) - low_pass_symbol(k, 0.5 * N);
}

}  // namespace lp

/// P_{<=N} f for any N > 0.
inline Field low_pass(const Field& f, double N) {
  if (!(N > 0.0)) throw DomainError("low_pass: N must be positive");
  return apply_multiplier(f, [&](double k, std::size_t) { return lp::low_pass_symbol(k, N); });
}

/// P_{>N} f = f - P_{<=N} f.
inline Field high_pass(const Field& f, double N) {
  if (!(N > 0.0)) throw DomainError("high_pass: N must be positive");
  return apply_multiplier(f, [&](double k, std::size_t) { return 1.0 - lp::low_pass_symbol(k, N); });
}

struct LpProjection {
  Field field;
  /// False when N is not a power of two inside the resolvable band; field is then zero.
  bool in_band;
};

/// Annular projection P_N f.
inline LpProjection littlewood_paley(const Field& f, double N) {
  const auto& g = f.grid();
  if (!lp::in_band(g, N)) return {Field(g, f.time()), false};
  return {apply_multiplier(f, [&](double k, std::size_t) { return lp::annulus_symbol(g, k, N); }), true};
}

/// All annular pieces P_N f over the resolvable band, sharing one forward transform.
inline std::vector<std::pair<double, Field>> littlewood_paley_pieces(const Field& f) {
  const auto& g = f.grid();
  std::vector<cplx> hat(f.data());
  detail::dft_forward(hat, hat);
  const double inv_n = 1.0 / static_cast<double>(g.n());
  const auto k = g.wavenumbers();
  std::vector<std::pair<double, Field>> out;
  for (double N : lp::dyadic_band(g)) {
    std::vector<cplx> buf(hat.size());
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = hat[j] * (lp::annulus_symbol(g, k[j], N) * inv_n);
    detail::dft_backward(buf, buf);
    out.emplace_back(N, Field(g, std::move(buf), f.time()));
  }
  return out;
}

}  // namespace nlsim
