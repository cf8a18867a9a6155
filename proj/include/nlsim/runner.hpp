#pragma once

// Config-driven runs: building the model and initial data, simulate / wave-operator
// summaries, checkpoint re-analysis, profile extraction and parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsim/checkpoint_io.hpp"
#include "nlsim/config.hpp"
#include "nlsim/evolve.hpp"
#include "nlsim/inhomogeneity.hpp"
#include "nlsim/littlewood_paley.hpp"
#include "nlsim/ndjson.hpp"
#include "nlsim/profiles.hpp"
#include "nlsim/trajectory_analysis.hpp"

namespace nlsim {

inline Grid1D make_grid(const RunConfig& c) { return Grid1D(c.grid.n, c.grid.L); }

inline Inhomogeneity make_inhomogeneity(const RunConfig& c, const Grid1D& grid) {
  if (!c.model.a_file.empty()) return inhomogeneity_from_file(c.model.a_file, grid, c.model.tail_tol);
  return validate(Expression(c.model.a), grid, c.model.tail_tol);
}

/// Ground state of Q'' - Q + Q^{p+1} = 0, the profile of the standing wave e^{it}Q
/// of the focusing problem a = -1.
inline double focusing_ground_state(double x, double p) {
  const double s = 1.0 / std::cosh(0.5 * p * x);
  return std::pow(0.5 * (p + 2.0) * s * s, 1.0 / p);
}

inline Field make_initial(const RunConfig& c, const Grid1D& grid) {
  const auto& ic = c.initial;
  Field u(grid);
  switch (ic.kind) {
    case InitialKind::Zero:
      break;
    case InitialKind::Gaussian:
      u = Field::from_function(grid, [&](double x) {
        const double y = (x - ic.x0) / ic.width;
        return ic.amplitude * std::exp(-0.5 * y * y) * std::polar(1.0, ic.velocity * x);
      });
      break;
    case InitialKind::Soliton:
      u = Field::from_function(grid, [&](double x) {
        return ic.amplitude * focusing_ground_state(x - ic.x0, c.model.p) * std::polar(1.0, ic.velocity * x);
      });
      break;
    case InitialKind::Checkpoint: {
      u = read_checkpoint(ic.path);
      if (!(u.grid() == grid)) {
        throw ConfigError("initial checkpoint grid (n = " + std::to_string(u.grid().n()) + ", L = " +
                          format_double(u.grid().half_length()) + ") does not match the grid section");
      }
      break;
    }
  }
  if (ic.noise > 0.0) {
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> nd(0.0, ic.noise);
    Field w(grid);
    for (std::size_t j = 0; j < grid.n(); ++j) w[j] = cplx(nd(rng), nd(rng));
    const double t = u.time();
    u.set_time(0.0);
    u += low_pass(w, 0.25 * grid.k_max());
    u.set_time(t);
  }
  return u;
}

inline nlohmann::json admissibility_json(const Inhomogeneity& a, double p) {
  const auto& r = a.report();
  const bool needs_l1 = !(p > 4.0);
  return {{"a", a.description()},
          {"p", p},
          {"admissible", a.admissible_for(p)},
          {"hypotheses",
           {{"finite", r.finite},
            {"nonnegative", r.nonnegative},
            {"repulsive", r.repulsive},
            {"gradient_vanishes_at_infinity", r.gradient_vanishes_at_infinity},
            {"decay_class", to_string(r.decay_class)},
            {"decay_required", needs_l1 ? "integrable_and_bounded" : "bounded_only"},
            {"decay_ok", !needs_l1 || r.decay_class == DecayClass::IntegrableAndBounded}}},
          {"measurements",
           {{"min_a", r.min_a},
            {"max_x_da", r.max_x_da},
            {"sup_da", r.sup_da},
            {"tail_sup_da", r.tail_sup_da},
            {"tail_integral_a", r.tail_integral_a},
            {"tail_integral_da", r.tail_integral_da},
            {"a_minus", r.a_minus},
            {"a_plus", r.a_plus}}}};
}

inline void write_diagnostics(const std::vector<DiagnosticsRecord>& recs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StructuralError("cannot write diagnostics: " + path.string());
  for (const auto& r : recs) out << r.to_ndjson() << '\n';
}

namespace runner_detail {

inline nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline double max_relative_drift(const std::vector<DiagnosticsRecord>& recs, double DiagnosticsRecord::*field) {
  if (recs.empty()) return 0.0;
  const double ref = recs.front().*field;
  double worst = 0.0;
  for (const auto& r : recs) worst = std::max(worst, std::abs(r.*field - ref));
  return ref != 0.0 ? worst / std::abs(ref) : worst;
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StructuralError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace runner_detail

/// Summary of a finished trajectory: drifts, free distance, scattering status,
/// weighted-integral report and the compactness probe.
inline nlohmann::json trajectory_summary(const Trajectory& traj, const SolverConfig& cfg) {
  using runner_detail::num;
  const auto& recs = traj.diagnostics;
  nlohmann::json s;
  s["final_time"] = traj.final_time();
  s["checkpoints"] = traj.checkpoints.size();
  s["diagnostics_records"] = recs.size();
  s["boundary_violation"] = traj.boundary_violation;
  s["boundary_violation_time"] = num(traj.boundary_violation_time);
  s["stopped_early"] = traj.stopped_early;
  s["warning"] = traj.boundary_violation
                     ? nlohmann::json("boundary mass fraction exceeded " + format_double(cfg.boundary_mass_tol) +
                                      " at t = " + format_double(traj.boundary_violation_time) +
                                      "; enlarge L")
                     : nlohmann::json(nullptr);
  s["mass_drift"] = runner_detail::max_relative_drift(recs, &DiagnosticsRecord::mass);
  s["energy_drift"] = runner_detail::max_relative_drift(recs, &DiagnosticsRecord::energy);
  s["h1_free_distance"] = free_distance(traj);

  nlohmann::json sc;
  try {
    const auto st = extract_scattering_state(traj, cfg);
    sc = {{"scattered", st.scattered},
          {"status", st.status},
          {"last_residual", st.residuals.empty() ? nlohmann::json(nullptr) : nlohmann::json(st.residuals.back())},
          {"residuals", st.residuals},
          {"times", st.times},
          {"u_plus_h1", h1_norm(st.u_plus)}};
  } catch (const StructuralError& e) {
    sc = {{"scattered", false}, {"status", "insufficient checkpoints"}, {"last_residual", nullptr}};
  }
  s["scattering"] = sc;

  const double T = traj.final_time();
  if (T > 1.0) {
    const auto m = morawetz_integrals(recs, T);
    s["morawetz"] = {{"t_report", T},
                     {"z_int", m.z_integral.empty() ? 0.0 : m.z_integral.back()},
                     {"pot_int", m.potential_integral.empty() ? 0.0 : m.potential_integral.back()},
                     {"z_plateau", m.z_plateau},
                     {"pot_plateau", m.potential_plateau},
                     {"sup_morawetz", m.sup_morawetz},
                     {"sup_h1", m.sup_h1},
                     {"fitted_constant", m.morawetz_constant}};
    const auto cp = compactness_probe(recs);
    s["compactness"] = cp.to_json();
  } else {
    s["morawetz"] = nullptr;
    s["compactness"] = nullptr;
  }
  if (!recs.empty()) {
    s["final_record"] = nlohmann::json::parse(recs.back().to_ndjson());
  }
  return s;
}

struct SimulationResult {
  Trajectory trajectory;
  nlohmann::json summary;
};

/// solve_ivp from the configured data; with write_outputs the diagnostics NDJSON,
/// checkpoints and summary land in c.output.dir.
inline SimulationResult run_simulation(const RunConfig& c, bool write_outputs = true) {
  const Grid1D grid = make_grid(c);
  const Inhomogeneity a = make_inhomogeneity(c, grid);
  detail::require_model(a, c.model.p, c.solver);
  const Field u0 = make_initial(c, grid);
  SimulationResult res{solve_ivp(u0, a, c.model.p, c.solver), {}};
  res.summary = {{"command", "simulate"},
                 {"model", {{"p", c.model.p}, {"a", a.description()}, {"admissible", a.admissible_for(c.model.p)}}},
                 {"seed", c.seed},
                 {"result", trajectory_summary(res.trajectory, c.solver)}};
  if (write_outputs) {
    const std::filesystem::path dir = c.output.dir;
    std::filesystem::create_directories(dir);
    write_diagnostics(res.trajectory.diagnostics, dir / c.output.diagnostics);
    if (!c.output.checkpoints.empty()) write_checkpoint_directory(res.trajectory.checkpoints, dir / c.output.checkpoints);
    runner_detail::write_json(res.summary, dir / c.output.summary);
  }
  return res;
}

struct WaveOperatorResult {
  FinalStateResult final_state;
  double roundtrip_error = 0.0;
  nlohmann::json summary;
};

/// Treats the configured initial data as the asymptotic state u_plus, solves the
/// final-state problem and re-extracts u_plus from the forward run.
inline WaveOperatorResult run_wave_operator(const RunConfig& c, bool write_outputs = true) {
  const Grid1D grid = make_grid(c);
  const Inhomogeneity a = make_inhomogeneity(c, grid);
  detail::require_model(a, c.model.p, c.solver);
  Field u_plus = make_initial(c, grid);
  u_plus.set_time(0.0);
  WaveOperatorResult res{solve_final_state(u_plus, a, c.model.p, c.solver), 0.0, {}};
  const auto& traj = res.final_state.trajectory;
  const Field& end = traj.final_state();
  Field recovered = free_evolve(end, -end.time());
  recovered.set_time(0.0);
  res.roundtrip_error = h1_norm(recovered - u_plus);
  res.summary = {{"command", "wave-op"},
                 {"model", {{"p", c.model.p}, {"a", a.description()}}},
                 {"u_plus_h1", h1_norm(u_plus)},
                 {"u0_h1", h1_norm(traj.checkpoints.front())},
                 {"iterations", res.final_state.iterations},
                 {"residual_history", res.final_state.residual_history},
                 {"roundtrip_error", res.roundtrip_error},
                 {"boundary_violation", traj.boundary_violation},
                 {"warning", traj.boundary_violation ? nlohmann::json("boundary mass fraction exceeded; enlarge L")
                                                     : nlohmann::json(nullptr)}};
  if (write_outputs) {
    const std::filesystem::path dir = c.output.dir;
    std::filesystem::create_directories(dir);
    write_checkpoint(traj.checkpoints.front(), dir / "u0.nls1");
    write_diagnostics(traj.diagnostics, dir / c.output.diagnostics);
    runner_detail::write_json(res.summary, dir / c.output.summary);
  }
  return res;
}

/// Diagnostics, weighted integrals and compactness probe recomputed from a checkpoint directory.
inline nlohmann::json analyze_checkpoints(const RunConfig& c, const std::filesystem::path& dir,
                                          double t_report = -1.0) {
  auto snaps = read_checkpoint_directory(dir);
  if (snaps.empty()) throw StructuralError("no checkpoints listed in " + dir.string());
  std::stable_sort(snaps.begin(), snaps.end(), [](const Field& x, const Field& y) { return x.time() < y.time(); });
  const Grid1D grid = snaps.front().grid();
  for (const auto& s : snaps) require_same_grid(grid, s.grid(), "analyze_checkpoints");
  const Inhomogeneity a = make_inhomogeneity(c, grid);
  const auto recs = analyze_snapshots(snaps, a, c.model.p, c.solver.toggles);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : recs) rows.push_back(nlohmann::json::parse(r.to_ndjson()));
  const double T = t_report > 0.0 ? t_report : recs.back().t;
  nlohmann::json out = {{"command", "morawetz"}, {"snapshots", snaps.size()}, {"records", rows}};
  if (T > 1.0) {
    out["morawetz_integrals"] = morawetz_integrals(recs, T).to_json();
    out["compactness"] = compactness_probe(recs, T).to_json();
  } else {
    out["morawetz_integrals"] = nullptr;
    out["compactness"] = nullptr;
  }
  return out;
}

/// Profile decomposition of the sequence stored in a checkpoint directory.
inline nlohmann::json run_profiles(const RunConfig& c, const std::filesystem::path& dir) {
  const auto seq = read_checkpoint_directory(dir);
  if (seq.empty()) throw StructuralError("no checkpoints listed in " + dir.string());
  const Inhomogeneity a = make_inhomogeneity(c, seq.front().grid());
  ProfileOptions opt = c.profiles;
  opt.p = c.model.p;
  auto rep = decompose(seq, a, opt);
  nlohmann::json out = rep.to_json();
  out["sequence_length"] = seq.size();
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : rep.steps) st.push_back(s.status);
  out["statuses"] = st;
  return out;
}

// ---------------------------------------------------------------------------------------
// sweeps

struct SweepRow {
  std::size_t index = 0;
  double p = 0.0;
  double amplitude = 0.0;
  double x0 = 0.0;
  std::string status = "ok";
  std::string error;
  int exit_code = 0;
  nlohmann::json summary;
};

/// Cartesian product of the sweep axes; an empty axis keeps the base value.
inline std::vector<RunConfig> sweep_configs(const RunConfig& base) {
  auto axis = [](const std::vector<double>& v, double dflt) { return v.empty() ? std::vector<double>{dflt} : v; };
  std::vector<RunConfig> out;
  for (double p : axis(base.sweep.p, base.model.p)) {
    for (double amp : axis(base.sweep.amplitude, base.initial.amplitude)) {
      for (double x0 : axis(base.sweep.x0, base.initial.x0)) {
        RunConfig c = base;
        c.model.p = p;
        c.profiles.p = p;
        c.initial.amplitude = amp;
        c.initial.x0 = x0;
        c.sweep = {};
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

/// Worker count: explicit request if positive, else NLS_THREADS, else hardware concurrency;
/// never more than the number of jobs.
inline std::size_t resolve_threads(long requested, std::size_t jobs) {
  long n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("NLS_THREADS"); env && *env) {
      char* end = nullptr;
      n = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || n <= 0) throw DomainError(std::string("NLS_THREADS must be a positive integer, got '") + env + "'");
    } else {
      n = static_cast<long>(std::max(1u, std::thread::hardware_concurrency()));
    }
  }
  return std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

/// Maps an in-flight exception to the CLI exit-code convention.
inline int classify_exception(std::exception_ptr e, std::string& message) {
  try {
    std::rethrow_exception(e);
  } catch (const InadmissibleModel& x) {
    message = x.what();
    return 3;
  } catch (const SolverAbort& x) {
    message = std::string(x.what()) + " at t = " + format_double(x.time());
    return 4;
  } catch (const NonConvergence& x) {
    message = std::string(x.what()) + " (residual " + format_double(x.residual()) + ")";
    return 4;
  } catch (const std::exception& x) {
    message = x.what();
    return 2;
  }
}

/// Runs every row on a bounded pool; failures are recorded per row and do not stop the sweep.
inline std::vector<SweepRow> run_sweep(const RunConfig& base, std::size_t threads) {
  const auto cfgs = sweep_configs(base);
  std::vector<SweepRow> rows(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      SweepRow& row = rows[i];
      row.index = i;
      row.p = cfgs[i].model.p;
      row.amplitude = cfgs[i].initial.amplitude;
      row.x0 = cfgs[i].initial.x0;
      try {
        row.summary = run_simulation(cfgs[i], false).summary;
      } catch (...) {
        row.exit_code = classify_exception(std::current_exception(), row.error);
        row.status = "failed";
      }
    }
  };
  const std::size_t n = std::min(threads, cfgs.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  auto field = [](const nlohmann::json& j) -> std::string {
    if (j.is_null()) return "";
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number()) return format_double(j.get<double>());
    return j.dump();
  };
  std::string out =
      "index,p,amplitude,x0,status,exit_code,final_time,mass_drift,energy_drift,h1_free_distance,scattering,"
      "scattering_residual,boundary_violation,error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.index) + "," + format_double(r.p) + "," + format_double(r.amplitude) + "," +
           format_double(r.x0) + "," + r.status + "," + std::to_string(r.exit_code) + ",";
    if (r.status == "ok") {
      const auto& s = r.summary.at("result");
      out += field(s.at("final_time")) + "," + field(s.at("mass_drift")) + "," + field(s.at("energy_drift")) + "," +
             field(s.at("h1_free_distance")) + "," + field(s.at("scattering").at("scattered")) + "," +
             field(s.at("scattering").at("last_residual")) + "," + field(s.at("boundary_violation")) + ",";
    } else {
      out += ",,,,,,,";
    }
    out += (r.error.empty() ? std::string() : quote(r.error)) + "\n";
  }
  return out;
}

}  // namespace nlsim
