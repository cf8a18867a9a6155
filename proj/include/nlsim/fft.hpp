#pragma once

// FFTW-backed discrete Fourier transforms on Grid1D.
//
// Plans are created once per size with FFTW_ESTIMATE (deterministic, no timing
// measurements) and cached process-wide. Plan creation is serialized by a mutex;
// execution through fftw_execute_dft with caller-owned buffers is reentrant.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "nlsim/grid.hpp"

namespace nlsim {

namespace detail {

class FftPlanCache {
 public:
  struct Plans {
    fftw_plan forward;
    fftw_plan backward;
  };

  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  Plans get(std::size_t n) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(n); it != plans_.end()) return it->second;
    // in-place plans; every execution runs in place
    std::vector<cplx> buf(n);
    auto* pbuf = reinterpret_cast<fftw_complex*>(buf.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_1d(static_cast<int>(n), pbuf, pbuf, FFTW_FORWARD, flags),
            fftw_plan_dft_1d(static_cast<int>(n), pbuf, pbuf, FFTW_BACKWARD, flags)};
    plans_.emplace(n, p);
    return p;
  }

  FftPlanCache(const FftPlanCache&) = delete;
  FftPlanCache& operator=(const FftPlanCache&) = delete;

 private:
  FftPlanCache() = default;
  ~FftPlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<std::size_t, Plans> plans_;
};

/// Unnormalized forward DFT, out_j = sum_m in_m e^{-2 pi i j m / n}. In-place allowed.
inline void dft_forward(std::vector<cplx>& in, std::vector<cplx>& out) {
  if (&in != &out) out = in;
  const auto plans = FftPlanCache::instance().get(out.size());
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans.forward, buf, buf);
}

/// Unnormalized backward DFT, out_m = sum_j in_j e^{+2 pi i j m / n}. In-place allowed.
inline void dft_backward(std::vector<cplx>& in, std::vector<cplx>& out) {
  if (&in != &out) out = in;
  const auto plans = FftPlanCache::instance().get(out.size());
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans.backward, buf, buf);
}

}  // namespace detail

/// Unitary transform to the continuous-Fourier-transform normalization.
inline Spectrum transform(const Field& field) {
  const auto& g = field.grid();
  if (field.size() != g.n()) throw StructuralError("transform: sample count does not match grid");
  std::vector<cplx> buf(field.data());
  detail::dft_forward(buf, buf);
  const double scale = g.dx() / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < buf.size(); ++j) {
    // e^{-i k_j x_0} with x_0 = -L equals (-1)^j
    buf[j] *= (j & 1U) ? -scale : scale;
  }
  return Spectrum(g, std::move(buf));
}

inline Field inverse_transform(const Spectrum& spec, double t = 0.0) {
  const auto& g = spec.grid();
  if (spec.size() != g.n()) throw StructuralError("inverse_transform: mode count does not match grid");
  std::vector<cplx> buf(spec.modes().begin(), spec.modes().end());
  const double scale = g.dk() / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= (j & 1U) ? -scale : scale;
  detail::dft_backward(buf, buf);
  return Field(g, std::move(buf), t);
}

/// u -> F^{-1}[ m(k_j, j) * F u ] for a multiplier callable m(k, j) -> complex,
/// where k is the raw lattice wavenumber in transform order.
template <class Multiplier>
Field apply_multiplier(const Field& field, Multiplier&& m) {
  const auto& g = field.grid();
  std::vector<cplx> buf(field.data());
  detail::dft_forward(buf, buf);
  const double inv_n = 1.0 / static_cast<double>(g.n());
  const auto k = g.wavenumbers();
  for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= cplx(m(k[j], j)) * inv_n;
  detail::dft_backward(buf, buf);
  return Field(g, std::move(buf), field.time());
}

/// Spectral derivative d/dx with the Nyquist mode zeroed.
inline Field derivative(const Field& field) {
  const auto keff = field.grid().derivative_wavenumbers();
  return apply_multiplier(field, [&](double, std::size_t j) { return cplx(0.0, keff[j]); });
}

/// Spectral derivative of real samples; returns the real part.
inline std::vector<double> derivative(std::span<const double> values, const Grid1D& grid) {
  std::vector<cplx> s(values.begin(), values.end());
  if (s.size() != grid.n()) throw StructuralError("derivative: sample count does not match grid");
  const Field d = derivative(Field(grid, std::move(s)));
  std::vector<double> out(grid.n());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = d[j].real();
  return out;
}

/// Translation u(x) -> u(x - shift) as a Fourier phase; exact for band-limited data.
inline Field translate(const Field& field, double shift) {
  return apply_multiplier(field, [&](double k, std::size_t j) {
    if (j == field.grid().nyquist_index()) return cplx(std::cos(k * shift), 0.0);
    return std::polar(1.0, -k * shift);
  });
}

}  // namespace nlsim
