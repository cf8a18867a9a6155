#pragma once

// Post-processing of diagnostics streams: weighted Morawetz integrals with a plateau
// statistic, and the lower-bound probe on the Z-norm.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsim/evolve.hpp"

namespace nlsim {

namespace detail {

/// Linear interpolation of a record column at time t (records sorted by t).
template <class Get>
double interpolate_records(const std::vector<DiagnosticsRecord>& recs, double t, Get get) {
  if (t <= recs.front().t) return get(recs.front());
  for (std::size_t i = 1; i < recs.size(); ++i) {
    if (recs[i].t >= t) {
      const double w = (t - recs[i - 1].t) / (recs[i].t - recs[i - 1].t);
      return (1.0 - w) * get(recs[i - 1]) + w * get(recs[i]);
    }
  }
  return get(recs.back());
}

inline double plateau(double full, double half) { return full > 0.0 ? (full - half) / full : 0.0; }

}  // namespace detail

struct MorawetzIntegralsReport {
  double t_report = 0.0;
  std::vector<double> times;
  std::vector<double> z_integral;
  std::vector<double> potential_integral;
  /// (I(T) - I(T/2)) / I(T), zero when I(T) = 0.
  double z_plateau = 0.0;
  double potential_plateau = 0.0;
  double sup_morawetz = 0.0;
  double sup_h1 = 0.0;
  /// sup |M_b| / (sup ||u||_{H^1})^2.
  double morawetz_constant = 0.0;

  nlohmann::json to_json() const {
    return {{"check", "morawetz_integrals"},
            {"params", {{"t_report", t_report}}},
            {"z_integral", z_integral.empty() ? 0.0 : z_integral.back()},
            {"potential_integral", potential_integral.empty() ? 0.0 : potential_integral.back()},
            {"z_plateau", z_plateau},
            {"potential_plateau", potential_plateau},
            {"sup_morawetz", sup_morawetz},
            {"sup_h1", sup_h1},
            {"fitted_constant", morawetz_constant}};
  }
};

/// Partial weighted integrals up to t_report taken from the diagnostics stream.
inline MorawetzIntegralsReport morawetz_integrals(const std::vector<DiagnosticsRecord>& recs, double t_report = 50.0) {
  if (recs.empty() || recs.back().t < t_report * (1.0 - 1e-12)) {
    throw DomainError("morawetz_integrals: trajectory ends at t = " +
                      std::to_string(recs.empty() ? 0.0 : recs.back().t) + " before t_report = " +
                      std::to_string(t_report));
  }
  MorawetzIntegralsReport rep;
  rep.t_report = t_report;
  for (const auto& r : recs) {
    if (r.t > t_report * (1.0 + 1e-12)) break;
    rep.times.push_back(r.t);
    rep.z_integral.push_back(r.z_int);
    rep.potential_integral.push_back(r.pot_int);
    rep.sup_h1 = std::max(rep.sup_h1, r.h1);
    if (std::isfinite(r.morawetz)) rep.sup_morawetz = std::max(rep.sup_morawetz, std::abs(r.morawetz));
  }
  auto zi = [](const DiagnosticsRecord& r) { return r.z_int; };
  auto pi = [](const DiagnosticsRecord& r) { return r.pot_int; };
  rep.z_plateau = detail::plateau(detail::interpolate_records(recs, t_report, zi),
                                  detail::interpolate_records(recs, 0.5 * t_report, zi));
  rep.potential_plateau = detail::plateau(detail::interpolate_records(recs, t_report, pi),
                                          detail::interpolate_records(recs, 0.5 * t_report, pi));
  rep.morawetz_constant = rep.sup_h1 > 0.0 ? rep.sup_morawetz / (rep.sup_h1 * rep.sup_h1) : 0.0;
  return rep;
}

inline MorawetzIntegralsReport morawetz_integrals(const Trajectory& traj, double t_report = 50.0) {
  return morawetz_integrals(traj.diagnostics, t_report);
}

struct CompactnessReport {
  /// Final time reaches 20.
  bool sufficient = false;
  double z_at_one = std::numeric_limits<double>::quiet_NaN();
  double inf_z = std::numeric_limits<double>::quiet_NaN();
  double t_inf = std::numeric_limits<double>::quiet_NaN();
  /// min Z over [T/2, T] for the final time T.
  double late_window_min = std::numeric_limits<double>::quiet_NaN();
  /// inf_z / z_at_one.
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::string interpretation;

  nlohmann::json to_json() const {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"check", "compactness_probe"},
            {"sufficient", sufficient},
            {"z_at_one", num(z_at_one)},
            {"inf_z", num(inf_z)},
            {"t_inf", num(t_inf)},
            {"late_window_min", num(late_window_min)},
            {"ratio", num(ratio)},
            {"interpretation", interpretation}};
  }
};

/// inf over sampled t >= 1 (up to t_max) of Z(t) relative to Z(1).
inline CompactnessReport compactness_probe(const std::vector<DiagnosticsRecord>& recs,
                                           double t_max = std::numeric_limits<double>::infinity()) {
  CompactnessReport rep;
  std::vector<const DiagnosticsRecord*> window;
  for (const auto& r : recs) {
    if (r.t >= 1.0 && r.t <= t_max * (1.0 + 1e-12) && std::isfinite(r.z)) window.push_back(&r);
  }
  if (window.empty()) {
    rep.interpretation = "no Z samples at t >= 1";
    return rep;
  }
  const double T = window.back()->t;
  rep.sufficient = T >= 20.0;
  rep.z_at_one = window.front()->z;
  rep.inf_z = window.front()->z;
  rep.t_inf = window.front()->t;
  for (const auto* r : window) {
    if (r->z < rep.inf_z) {
      rep.inf_z = r->z;
      rep.t_inf = r->t;
    }
    if (r->t >= 0.5 * T) {
      rep.late_window_min = std::isfinite(rep.late_window_min) ? std::min(rep.late_window_min, r->z) : r->z;
    }
  }
  if (rep.z_at_one > 0.0) rep.ratio = rep.inf_z / rep.z_at_one;
  if (rep.z_at_one == 0.0) {
    rep.interpretation = "zero solution: Z vanishes identically";
  } else if (rep.ratio <= 0.5) {
    rep.interpretation =
        "Z decays along the run, consistent with a finite integral of Z^2 dt/t (no compact solution)";
  } else {
    rep.interpretation =
        "Z stays bounded below along the run, the behaviour of a compact (non-dispersing) solution";
  }
  if (!rep.sufficient) rep.interpretation += "; run shorter than t = 20";
  return rep;
}

inline CompactnessReport compactness_probe(const Trajectory& traj,
                                           double t_max = std::numeric_limits<double>::infinity()) {
  return compactness_probe(traj.diagnostics, t_max);
}

/// Diagnostics recomputed from stored snapshots (sorted by time).
inline std::vector<DiagnosticsRecord> analyze_snapshots(const std::vector<Field>& snaps, const Inhomogeneity& a,
                                                        double p, DiagnosticsToggles toggles = {}) {
  DiagnosticsMonitor monitor(a, p, toggles);
  std::vector<DiagnosticsRecord> out;
  out.reserve(snaps.size());
  for (const auto& s : snaps) out.push_back(monitor.record(s));
  return out;
}

}  // namespace nlsim
