#pragma once

// Monte-Carlo constant estimation for the pointwise and Holder-type estimates on the
// nonlinearity f(z) = |z|^p z:
//
//   bpw1      |f(u+w) - f(u)| / (|w|^{p+1} + |w||u|^p)
//   bpw2      |d/dx[f(u+w) - f(u)]| / (|w'||w|^p + |w'||u|^p + |u'||w|^p + |u'||w||u|^{p-1})
//   pw2_J     |sum_j d/dx f(v_j) - d/dx f(sum_j v_j)|
//               / (sum_{j!=k} |v_j'||v_k|^p + sum_{j!=k} |v_j'||v_j|^{p-1}|v_k|),  v_j real
//   holder    ||a f |g|^p||_{L^{4/3}_t L^1_x} / (||a||_rho ||f||_{L^4_t L^inf_x} ||g||^p_{L^{2p}_t L^r_x})
//   refined_sobolev   see profiles.hpp
//
// Each entry reports the largest ratio seen (the fitted constant).

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsim/exponents.hpp"
#include "nlsim/profiles.hpp"

namespace nlsim {

struct InequalityResult {
  std::string name;
  std::size_t trials = 0;
  double max_ratio = 0.0;
  bool finite = true;
};

struct InequalitySuiteReport {
  std::uint64_t seed = 0;
  double p = 3.0;
  double rse_r = 4.0;
  std::vector<InequalityResult> results;

  const InequalityResult& find(const std::string& name) const {
    for (const auto& r : results) {
      if (r.name == name) return r;
    }
    throw StructuralError("inequality suite: no entry " + name);
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results) {
      rows.push_back({{"name", r.name}, {"trials", r.trials}, {"fitted_constant", r.max_ratio}, {"finite", r.finite}});
    }
    return {{"check", "inequality_suite"}, {"params", {{"seed", seed}, {"p", p}, {"rse_r", rse_r}}}, {"ratio_table", rows}};
  }
};

namespace ineq {

/// f_z and f_zbar of f(z) = |z|^p z.
inline cplx f_value(cplx z, double p) { return std::pow(std::abs(z), p) * z; }
inline double f_z(cplx z, double p) { return (0.5 * p + 1.0) * std::pow(std::abs(z), p); }
inline cplx f_zbar(cplx z, double p) {
  const double m = std::abs(z);
  return m == 0.0 ? cplx{} : 0.5 * p * std::pow(m, p - 2.0) * z * z;
}
/// d/dx f(u) = f_z u' + f_zbar conj(u').
inline cplx f_derivative(cplx u, cplx du, double p) { return f_z(u, p) * du + f_zbar(u, p) * std::conj(du); }

inline double bpw1_ratio(cplx u, cplx w, double p) {
  const double rhs = std::pow(std::abs(w), p + 1.0) + std::abs(w) * std::pow(std::abs(u), p);
  const double lhs = std::abs(f_value(u + w, p) - f_value(u, p));
  return rhs > 0.0 ? lhs / rhs : 0.0;
}

inline double bpw2_ratio(cplx u, cplx w, cplx du, cplx dw, double p) {
  const double au = std::abs(u), aw = std::abs(w), adu = std::abs(du), adw = std::abs(dw);
  const double rhs = adw * std::pow(aw, p) + adw * std::pow(au, p) + adu * std::pow(aw, p) +
                     adu * aw * std::pow(au, p - 1.0);
  const double lhs = std::abs(f_derivative(u + w, du + dw, p) - f_derivative(u, du, p));
  return rhs > 0.0 ? lhs / rhs : 0.0;
}

/// v, dv real values and derivatives of the J functions at one point.
inline double pw2_ratio(const std::vector<double>& v, const std::vector<double>& dv, double p) {
  // for real v, d/dx f(v) = (p+1)|v|^p v'
  double sum_v = 0.0, sum_dv = 0.0, lhs_sum = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    sum_v += v[j];
    sum_dv += dv[j];
    lhs_sum += (p + 1.0) * std::pow(std::abs(v[j]), p) * dv[j];
  }
  const double lhs = std::abs(lhs_sum - (p + 1.0) * std::pow(std::abs(sum_v), p) * sum_dv);
  double rhs = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (j == k) continue;
      rhs += std::abs(dv[j]) * std::pow(std::abs(v[k]), p);
      rhs += std::abs(dv[j]) * std::pow(std::abs(v[j]), p - 1.0) * std::abs(v[k]);
    }
  }
  return rhs > 0.0 ? lhs / rhs : 0.0;
}

/// Space-time arrays indexed [t * nx + x] with uniform weights dt, dx.
struct SpacetimeSample {
  std::size_t nt, nx;
  double dt, dx;
};

inline double mixed_norm(const std::vector<double>& mod, const SpacetimeSample& s, double q, double r) {
  double outer = 0.0;
  for (std::size_t i = 0; i < s.nt; ++i) {
    double inner = 0.0;
    if (std::isinf(r)) {
      for (std::size_t j = 0; j < s.nx; ++j) inner = std::max(inner, mod[i * s.nx + j]);
    } else {
      for (std::size_t j = 0; j < s.nx; ++j) inner += std::pow(mod[i * s.nx + j], r) * s.dx;
      inner = std::pow(inner, 1.0 / r);
    }
    outer += std::pow(inner, q) * s.dt;
  }
  return std::pow(outer, 1.0 / q);
}

/// Holder nonlinear estimate on a discrete space-time sample with uniform quadrature weights.
inline double holder_ratio(const std::vector<double>& a, const std::vector<cplx>& f, const std::vector<cplx>& g,
                           const SpacetimeSample& s, double p) {
  const auto ex = exponents_for(p);
  std::vector<double> lhs(s.nt * s.nx), fm(s.nt * s.nx), gm(s.nt * s.nx);
  for (std::size_t i = 0; i < s.nt; ++i) {
    for (std::size_t j = 0; j < s.nx; ++j) {
      const std::size_t idx = i * s.nx + j;
      fm[idx] = std::abs(f[idx]);
      gm[idx] = std::abs(g[idx]);
      lhs[idx] = std::abs(a[j]) * fm[idx] * std::pow(gm[idx], p);
    }
  }
  double a_norm = 0.0;
  if (std::isinf(ex.rho)) {
    for (double v : a) a_norm = std::max(a_norm, std::abs(v));
  } else {
    for (double v : a) a_norm += std::pow(std::abs(v), ex.rho) * s.dx;
    a_norm = std::pow(a_norm, 1.0 / ex.rho);
  }
  const double rhs = a_norm * mixed_norm(fm, s, 4.0, kInfinity) * std::pow(mixed_norm(gm, s, 2.0 * p, ex.r), p);
  return rhs > 0.0 ? mixed_norm(lhs, s, 4.0 / 3.0, 1.0) / rhs : 0.0;
}

}  // namespace ineq

/// Runs every estimate `trials` times with a seeded generator. Magnitudes are drawn
/// log-uniformly over six decades and phases uniformly. `field_trials` bounds the number
/// of refined Sobolev trials (which need transforms); 0 means `trials`. The refined
/// Sobolev entry uses exponent `rse_r`.
inline InequalitySuiteReport inequality_suite(std::uint64_t seed, std::size_t trials, double p = 3.0,
                                              std::size_t field_trials = 0, double rse_r = 4.0) {
  if (trials < 1) throw DomainError("inequality_suite: trials must be at least 1");
  (void)exponents_for(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logmag(-3.0, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::bernoulli_distribution sign(0.5);
  auto rand_c = [&]() { return std::polar(std::pow(10.0, logmag(rng)), phase(rng)); };
  auto rand_r = [&]() { return (sign(rng) ? 1.0 : -1.0) * std::pow(10.0, logmag(rng)); };

  InequalitySuiteReport rep;
  rep.seed = seed;
  rep.p = p;
  rep.rse_r = rse_r;
  auto record = [](InequalityResult& r, double v) {
    ++r.trials;
    if (!std::isfinite(v)) r.finite = false;
    else r.max_ratio = std::max(r.max_ratio, v);
  };

  InequalityResult b1{"bpw1"}, b2{"bpw2"}, j2{"pw2_J2"}, j3{"pw2_J3"}, hol{"holder"}, rse{"refined_sobolev"};
  for (std::size_t i = 0; i < trials; ++i) {
    record(b1, ineq::bpw1_ratio(rand_c(), rand_c(), p));
    record(b2, ineq::bpw2_ratio(rand_c(), rand_c(), rand_c(), rand_c(), p));
    record(j2, ineq::pw2_ratio({rand_r(), rand_r()}, {rand_r(), rand_r()}, p));
    record(j3, ineq::pw2_ratio({rand_r(), rand_r(), rand_r()}, {rand_r(), rand_r(), rand_r()}, p));
  }

  const ineq::SpacetimeSample st{4, 8, 0.25, 0.5};
  std::vector<double> a(st.nx);
  std::vector<cplx> f(st.nt * st.nx), g(st.nt * st.nx);
  for (std::size_t i = 0; i < trials; ++i) {
    for (auto& v : a) v = std::abs(rand_r());
    for (auto& z : f) z = rand_c();
    for (auto& z : g) z = rand_c();
    record(hol, ineq::holder_ratio(a, f, g, st, p));
  }

  // refined Sobolev on random multi-band fields: random dyadic weights over six decades
  const Grid1D grid(64, 8.0);
  std::normal_distribution<double> nd;
  const std::size_t nf = field_trials == 0 ? trials : field_trials;
  for (std::size_t i = 0; i < nf; ++i) {
    Field h(grid);
    for (std::size_t j = 0; j < grid.n(); ++j) h[j] = cplx(nd(rng), nd(rng));
    Field mixed(grid);
    for (auto& [N, piece] : littlewood_paley_pieces(h)) {
      piece *= cplx(std::pow(10.0, logmag(rng)));
      mixed += piece;
    }
    const auto res = refined_sobolev_ratio(mixed, rse_r);
    if (res.applicable) record(rse, res.ratio);
  }
  rep.results = {b1, b2, j2, j3, hol, rse};
  return rep;
}

}  // namespace nlsim
