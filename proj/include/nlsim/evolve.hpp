#pragma once

// Time integration of  i u_t + u_xx = a(x) |u|^p u  on the periodic grid.
//
// Strang splitting: half a free step, the exact nonlinear flow, half a free step. The
// nonlinear substep solves i u_t = a |u|^p u exactly as u -> e^{-i a |u|^p dt} u because
// |u| is constant along it, so every substep is an L2 isometry.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlsim/diagnostics.hpp"
#include "nlsim/exponents.hpp"
#include "nlsim/fft.hpp"
#include "nlsim/model.hpp"
#include "nlsim/norms.hpp"
#include "nlsim/propagator.hpp"

namespace nlsim {

enum class Scheme { Strang };

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  Scheme scheme = Scheme::Strang;
  /// Steps between stored checkpoints (the initial and final states are always stored).
  std::size_t checkpoint_every = 1000;
  /// Steps between diagnostics records.
  std::size_t diagnostics_every = 10;
  /// Largest tolerated fraction of mass in |x| > 0.9 L.
  double boundary_mass_tol = 1e-8;
  /// Stop at the first boundary violation; otherwise flag it and continue.
  bool stop_on_boundary = true;
  /// Permit inhomogeneities that fail the admissibility hypotheses.
  bool unsafe_physics = false;
  DiagnosticsToggles toggles{};

  // final-state problem
  double t_big = 40.0;
  std::size_t max_iters = 8;
  double correction_tol = 1e-6;

  // scattering detection
  double scattering_tol = 1e-3;
  double t_min = 0.0;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SolverConfig: dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("SolverConfig: t_end must be positive");
    if (checkpoint_every == 0 || diagnostics_every == 0) throw DomainError("SolverConfig: intervals must be positive");
    if (!(boundary_mass_tol > 0.0)) throw DomainError("SolverConfig: boundary_mass_tol must be positive");
    if (!(t_big > 0.0)) throw DomainError("SolverConfig: t_big must be positive");
    if (!(correction_tol > 0.0) || !(scattering_tol > 0.0)) throw DomainError("SolverConfig: tolerances must be positive");
    if (max_iters == 0) throw DomainError("SolverConfig: max_iters must be positive");
  }
};

/// Checkpoints in increasing time plus the diagnostics stream.
struct Trajectory {
  std::vector<Field> checkpoints;
  std::vector<DiagnosticsRecord> diagnostics;
  bool boundary_violation = false;
  double boundary_violation_time = std::numeric_limits<double>::quiet_NaN();
  bool stopped_early = false;

  const Field& final_state() const { return checkpoints.back(); }
  double final_time() const { return checkpoints.back().time(); }
};

/// Precomputed Strang step for a fixed grid, inhomogeneity, power and step size.
class StrangStepper {
 public:
  StrangStepper(const Inhomogeneity& a, double p, double dt) : a_(&a), p_(p), dt_(dt), half_(a.grid().n()) {
    const auto k = a.grid().derivative_wavenumbers();
    const double inv_n = 1.0 / static_cast<double>(a.grid().n());
    for (std::size_t j = 0; j < half_.size(); ++j) half_[j] = std::polar(inv_n, -0.5 * dt * k[j] * k[j]);
  }

  double dt() const noexcept { return dt_; }

  void step(Field& u) const {
    require_same_grid(u.grid(), a_->grid(), "step_strang");
    auto& s = u.data();
    linear_half(s);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double amp = std::abs(s[j]);
      s[j] *= std::polar(1.0, -(*a_)[j] * std::pow(amp, p_) * dt_);
    }
    linear_half(s);
    u.set_time(u.time() + dt_);
  }

 private:
  void linear_half(std::vector<cplx>& s) const {
    detail::dft_forward(s, s);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] *= half_[j];
    detail::dft_backward(s, s);
  }

  const Inhomogeneity* a_;
  double p_;
  double dt_;
  std::vector<cplx> half_;
};

/// One Strang step of size dt (negative dt integrates backward).
inline Field step_strang(const Field& u, const Inhomogeneity& a, double p, double dt) {
  Field out = u;
  StrangStepper(a, p, dt).step(out);
  if (!out.all_finite()) throw SolverAbort("blowup/instability: non-finite samples after step", out.time());
  return out;
}

using StepObserver = std::function<void(const Field&, std::size_t step)>;

namespace detail {

inline void require_model(const Inhomogeneity& a, double p, const SolverConfig& cfg) {
  (void)exponents_for(p);
  if (!cfg.unsafe_physics && !a.admissible_for(p)) {
    throw InadmissibleModel("inhomogeneity '" + a.description() + "' is not admissible for p = " + std::to_string(p) +
                      " (set unsafe_physics to override)");
  }
}

inline std::size_t step_count(double span, double dt) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
}

}  // namespace detail

/// Integrates nsteps steps of signed size dt from u without storing anything.
inline Field integrate(Field u, const Inhomogeneity& a, double p, double dt, std::size_t nsteps) {
  const StrangStepper stepper(a, p, dt);
  const double t0 = u.time();
  for (std::size_t s = 1; s <= nsteps; ++s) {
    stepper.step(u);
    u.set_time(t0 + static_cast<double>(s) * dt);
    if (!u.all_finite()) throw SolverAbort("blowup/instability: non-finite samples", u.time());
  }
  return u;
}

/// Initial-value problem from u0 (at u0.time()) over [t0, t0 + t_end].
inline Trajectory solve_ivp(const Field& u0, const Inhomogeneity& a, double p, const SolverConfig& cfg,
                            const StepObserver& observer = {}) {
  cfg.validate();
  detail::require_model(a, p, cfg);
  require_same_grid(u0.grid(), a.grid(), "solve_ivp");
  if (!u0.all_finite()) throw DomainError("solve_ivp: initial data has non-finite samples");

  Trajectory traj;
  DiagnosticsMonitor monitor(a, p, cfg.toggles);
  const StrangStepper stepper(a, p, cfg.dt);
  const std::size_t nsteps = detail::step_count(cfg.t_end, cfg.dt);
  const double t0 = u0.time();

  Field u = u0;
  traj.checkpoints.push_back(u);
  traj.diagnostics.push_back(monitor.record(u));
  auto check_boundary = [&](const Field& f) {
    if (!traj.boundary_violation && boundary_mass_fraction(f) > cfg.boundary_mass_tol) {
      traj.boundary_violation = true;
      traj.boundary_violation_time = f.time();
    }
  };
  check_boundary(u);
  if (observer) observer(u, 0);

  for (std::size_t s = 1; s <= nsteps; ++s) {
    stepper.step(u);
    u.set_time(t0 + static_cast<double>(s) * cfg.dt);
    if (!u.all_finite()) throw SolverAbort("blowup/instability: non-finite samples", u.time());
    if (observer) observer(u, s);
    const bool last = s == nsteps;
    if (s % cfg.diagnostics_every == 0 || last) {
      traj.diagnostics.push_back(monitor.record(u));
      check_boundary(u);
    }
    if (s % cfg.checkpoint_every == 0 || last) traj.checkpoints.push_back(u);
    if (traj.boundary_violation && cfg.stop_on_boundary) {
      if (traj.checkpoints.back().time() != u.time()) traj.checkpoints.push_back(u);
      traj.stopped_early = !last;
      break;
    }
  }
  return traj;
}

struct ScatteringState {
  Field u_plus;
  std::vector<double> times;
  /// ||v(t_{i+1}) - v(t_i)||_{H^1} for v(t) = e^{-itDelta} u(t) at consecutive checkpoints.
  std::vector<double> residuals;
  bool scattered = false;
  std::string status;
};

/// Scattering state e^{-itDelta}u(t) at the last checkpoint, with Cauchy residuals over
/// the checkpoints at t >= cfg.t_min. Scattering is declared when the last residual is
/// below cfg.scattering_tol and the last three residuals do not increase.
inline ScatteringState extract_scattering_state(const Trajectory& traj, const SolverConfig& cfg) {
  std::vector<const Field*> late;
  for (const auto& c : traj.checkpoints) {
    if (c.time() >= cfg.t_min) late.push_back(&c);
  }
  if (late.size() < 2) {
    throw StructuralError("extract_scattering_state: need at least two checkpoints at t >= " +
                          std::to_string(cfg.t_min));
  }
  ScatteringState st{free_evolve(*late.back(), -late.back()->time()), {}, {}, false, {}};
  st.u_plus.set_time(0.0);
  Field prev = free_evolve(*late.front(), -late.front()->time());
  st.times.push_back(late.front()->time());
  for (std::size_t i = 1; i < late.size(); ++i) {
    Field v = free_evolve(*late[i], -late[i]->time());
    st.residuals.push_back(h1_norm(v - prev));
    st.times.push_back(late[i]->time());
    prev = std::move(v);
  }
  const auto& r = st.residuals;
  if (r.size() < 3) {
    st.status = "insufficient samples";
    return st;
  }
  // increases at roundoff level do not count
  const double floor = 1e-12 * std::max(1.0, h1_norm(st.u_plus));
  bool nonincreasing = true;
  for (std::size_t i = r.size() - 2; i < r.size(); ++i) {
    if (r[i] > r[i - 1] + floor) nonincreasing = false;
  }
  if (!nonincreasing) {
    st.status = "not yet scattered: residuals increasing";
  } else if (r.back() >= cfg.scattering_tol) {
    st.status = "not yet scattered: residual above tolerance";
  } else {
    st.scattered = true;
    st.status = "scattered";
  }
  return st;
}

struct FinalStateResult {
  /// Forward trajectory from the reconstructed u(0) to t_big.
  Trajectory trajectory;
  std::vector<double> residual_history;
  std::size_t iterations = 0;
};

/// Final-state problem: find u with e^{-itDelta}u(t) -> u_plus. Starts from
/// u(t_big) = e^{i t_big Delta} u_plus, integrates back to t = 0, runs forward again and
/// corrects u(t_big) by the mismatch of the extracted scattering state until the H^1
/// correction falls below cfg.correction_tol.
inline FinalStateResult solve_final_state(const Field& u_plus, const Inhomogeneity& a, double p,
                                          const SolverConfig& cfg) {
  cfg.validate();
  detail::require_model(a, p, cfg);
  require_same_grid(u_plus.grid(), a.grid(), "solve_final_state");
  const std::size_t nsteps = detail::step_count(cfg.t_big, cfg.dt);
  const double t_big = static_cast<double>(nsteps) * cfg.dt;

  Field target = u_plus;
  target.set_time(0.0);
  Field terminal = free_evolve(target, t_big);

  SolverConfig fwd = cfg;
  fwd.t_end = t_big;
  FinalStateResult result;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    Field start = integrate(terminal, a, p, -cfg.dt, nsteps);
    start.set_time(0.0);
    result.trajectory = solve_ivp(start, a, p, fwd);
    const Field& end = result.trajectory.final_state();
    Field v = free_evolve(end, -end.time());
    v.set_time(0.0);
    const Field mismatch = target - v;
    const double residual = h1_norm(mismatch);
    result.residual_history.push_back(residual);
    result.iterations = it;
    if (residual < cfg.correction_tol) return result;
    Field correction = free_evolve(mismatch, t_big);
    correction.set_time(terminal.time());
    terminal += correction;
  }
  throw NonConvergence("solve_final_state: correction did not converge in " + std::to_string(cfg.max_iters) +
                           " iterations",
                       result.residual_history.back());
}

/// ||u(T) - e^{iTDelta}u(0)||_{H^1} at the final checkpoint.
inline double free_distance(const Trajectory& traj) {
  const Field& u0 = traj.checkpoints.front();
  const Field& uT = traj.checkpoints.back();
  return h1_norm(uT - free_evolve(u0, uT.time() - u0.time()));
}

/// ||u(t) - e^{itDelta}u0 + i integral_0^t e^{i(t-s)Delta} a|u|^p u(s) ds||_2 at checkpoint
/// `index`, with the time integral by the trapezoid rule over the checkpoints.
inline double duhamel_residual(const Trajectory& traj, const Inhomogeneity& a, double p, std::size_t index) {
  if (index >= traj.checkpoints.size()) throw StructuralError("duhamel_residual: index out of range");
  const Field& u0 = traj.checkpoints.front();
  const Field& ut = traj.checkpoints[index];
  const double t = ut.time();
  Field integral(ut.grid());
  for (std::size_t i = 0; i < index; ++i) {
    const Field& a0 = traj.checkpoints[i];
    const Field& a1 = traj.checkpoints[i + 1];
    const double h = a1.time() - a0.time();
    Field n0 = free_evolve(nonlinearity(a0, a, p), t - a0.time());
    Field n1 = free_evolve(nonlinearity(a1, a, p), t - a1.time());
    n0 += n1;
    n0 *= cplx(0.5 * h);
    n0.set_time(0.0);
    integral.set_time(0.0);
    integral += n0;
  }
  Field free = free_evolve(u0, t - u0.time());
  Field res = ut;
  res -= free;
  integral *= cplx(0.0, 1.0);
  res += integral;
  return l2_norm(res);
}

}  // namespace nlsim
