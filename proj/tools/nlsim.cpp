// nlsim command-line tool.
//
// exit codes: 0 success, 2 usage or domain error, 3 inadmissible model, 4 solver abort

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nlsim/nlsim.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double round5(double v) { return std::round(v * 1e5) / 1e5; }

ordered_json json_number(double v) {
  v = round5(v);
  if (v == std::floor(v) && std::abs(v) < 1e15) return static_cast<long long>(v);
  return v;
}

std::string short_number(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5f", round5(v));
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

int cmd_exponents(double p, bool as_json) {
  const auto e = nlsim::exponents_for(p);
  if (as_json) {
    ordered_json j;
    j["r"] = json_number(e.r);
    j["s"] = json_number(e.s);
    j["rho"] = std::isinf(e.rho) ? ordered_json(nullptr) : json_number(e.rho);
    j["Q"] = json_number(e.Q);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "r=" << short_number(e.r) << " s=" << short_number(e.s) << " rho=" << short_number(e.rho)
              << " Q=" << short_number(e.Q) << "\n";
  }
  return 0;
}

struct ModelOverrides {
  std::string config;
  std::string a;
  std::string a_file;
  std::optional<double> p;
  std::optional<std::size_t> n;
  std::optional<double> L;

  void add_to(CLI::App* cmd, bool with_grid) {
    cmd->add_option("--a", a, "inhomogeneity expression in x (overrides the config)");
    cmd->add_option("--a-file", a_file, "two-column (x, a) sample file (overrides the config)");
    cmd->add_option("--p", p, "nonlinearity power p > 2 (overrides the config)");
    if (with_grid) {
      cmd->add_option("--n", n, "grid points (power of two)");
      cmd->add_option("--L", L, "half length of the periodic box");
    }
  }

  nlsim::RunConfig resolve() const {
    nlsim::RunConfig c = config.empty() ? nlsim::RunConfig{} : nlsim::load_config(config);
    if (!a.empty()) {
      c.model.a = a;
      c.model.a_file.clear();
    }
    if (!a_file.empty()) c.model.a_file = a_file;
    if (p) c.model.p = *p;
    if (n) c.grid.n = *n;
    if (L) c.grid.L = *L;
    c.profiles.p = c.model.p;
    nlsim::check_config(c);
    return c;
  }
};

int cmd_validate(const ModelOverrides& m) {
  const auto c = m.resolve();
  const nlsim::Grid1D grid = nlsim::make_grid(c);
  const auto a = nlsim::make_inhomogeneity(c, grid);
  const auto report = nlsim::admissibility_json(a, c.model.p);
  std::cout << report.dump(2) << "\n";
  if (!a.admissible_for(c.model.p)) {
    std::cerr << "inadmissible: " << a.description() << " for p = " << nlsim::format_double(c.model.p) << "\n";
    return 3;
  }
  return 0;
}

void warn_boundary(const json& summary) {
  const json* w = nullptr;
  if (summary.contains("result")) w = &summary["result"]["warning"];
  else if (summary.contains("warning")) w = &summary["warning"];
  if (w && !w->is_null()) std::cerr << "warning: " << w->get<std::string>() << "\n";
}

int cmd_simulate(const std::string& path, const std::string& out) {
  auto c = nlsim::load_config(path);
  if (!out.empty()) c.output.dir = out;
  const auto res = nlsim::run_simulation(c, true);
  std::cout << res.summary.dump(2) << "\n";
  warn_boundary(res.summary);
  return 0;
}

int cmd_wave_op(const std::string& path, const std::string& out) {
  auto c = nlsim::load_config(path);
  if (!out.empty()) c.output.dir = out;
  const auto res = nlsim::run_wave_operator(c, true);
  std::cout << res.summary.dump(2) << "\n";
  warn_boundary(res.summary);
  return 0;
}

int cmd_morawetz(const ModelOverrides& m, const std::string& dir, double t_report) {
  std::cout << nlsim::analyze_checkpoints(m.resolve(), dir, t_report).dump(2) << "\n";
  return 0;
}

int cmd_profiles(const ModelOverrides& m, const std::string& dir) {
  std::cout << nlsim::run_profiles(m.resolve(), dir).dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& path, long threads, const std::string& csv) {
  const auto c = nlsim::load_config(path);
  const auto n = nlsim::resolve_threads(threads, nlsim::sweep_configs(c).size());
  const auto rows = nlsim::run_sweep(c, n);
  const auto table = nlsim::sweep_csv(rows);
  if (csv.empty()) {
    std::cout << table;
  } else {
    std::ofstream f(csv, std::ios::trunc);
    if (!f) throw nlsim::StructuralError("cannot write " + csv);
    f << table;
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  if (failed) std::cerr << failed << " of " << rows.size() << " sweep rows failed\n";
  return 0;
}

int cmd_inequalities(std::uint64_t seed, std::size_t trials, double p, std::size_t field_trials, double r) {
  std::cout << nlsim::inequality_suite(seed, trials, p, field_trials, r).to_json().dump(2) << "\n";
  return 0;
}

int cmd_check_config(const std::string& path) {
  std::cout << nlsim::to_json(nlsim::load_config(path)).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral toolkit for the inhomogeneous defocusing NLS i u_t + u_xx = a(x)|u|^p u"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nlsim 1.0");

  double exp_p = 0.0;
  bool exp_json = false;
  auto* exponents = app.add_subcommand("exponents", "print r(p), s(p), rho(p), Q(p)");
  exponents->add_option("p", exp_p, "nonlinearity power")->required();
  exponents->add_flag("--json", exp_json, "machine-readable output");

  ModelOverrides validate_m;
  auto* validate = app.add_subcommand("validate", "check the admissibility hypotheses on a(x)");
  validate->add_option("config", validate_m.config, "run config (optional)");
  validate_m.add_to(validate, true);

  std::string sim_cfg, sim_out;
  auto* simulate = app.add_subcommand("simulate", "run the initial-value problem with diagnostics");
  simulate->add_option("config", sim_cfg, "run config")->required();
  simulate->add_option("--out", sim_out, "output directory (overrides output.dir)");

  std::string wave_cfg, wave_out;
  auto* wave = app.add_subcommand("wave-op", "final-state problem: build u(0) from the configured u_plus");
  wave->add_option("config", wave_cfg, "run config; the initial section describes u_plus")->required();
  wave->add_option("--out", wave_out, "output directory (overrides output.dir)");

  ModelOverrides mor_m;
  std::string mor_dir;
  double mor_t = -1.0;
  auto* morawetz = app.add_subcommand("morawetz", "re-analyze a checkpoint directory");
  morawetz->add_option("dir", mor_dir, "checkpoint directory with index.txt")->required();
  morawetz->add_option("--config", mor_m.config, "run config supplying the model");
  morawetz->add_option("--t-report", mor_t, "report time for the weighted integrals (default: last snapshot)");
  mor_m.add_to(morawetz, false);

  ModelOverrides prof_m;
  std::string prof_dir;
  auto* profiles = app.add_subcommand("profiles", "bubble extraction on a sequence directory");
  profiles->add_option("dir", prof_dir, "checkpoint directory with index.txt")->required();
  profiles->add_option("--config", prof_m.config, "run config supplying the model and profile options");
  prof_m.add_to(profiles, false);

  std::string sweep_cfg, sweep_csv;
  long sweep_threads = 0;
  auto* sweep = app.add_subcommand("sweep", "cartesian sweep over p, amplitude and x0");
  sweep->add_option("config", sweep_cfg, "run config with a sweep section")->required();
  sweep->add_option("--threads", sweep_threads, "worker count (default: NLS_THREADS or hardware concurrency)");
  sweep->add_option("--csv", sweep_csv, "write the table here instead of stdout");

  std::uint64_t ineq_seed = 1;
  std::size_t ineq_trials = 100000, ineq_fields = 0;
  double ineq_p = 3.0, ineq_r = 4.0;
  auto* ineq = app.add_subcommand("inequalities", "Monte-Carlo constants of the nonlinear estimates");
  ineq->add_option("--seed", ineq_seed, "generator seed");
  ineq->add_option("--trials", ineq_trials, "trials per estimate");
  ineq->add_option("--p", ineq_p, "nonlinearity power");
  ineq->add_option("--field-trials", ineq_fields, "refined Sobolev trials (default: --trials)");
  ineq->add_option("--r", ineq_r, "refined Sobolev exponent");

  std::string check_cfg;
  auto* check = app.add_subcommand("check-config", "validate a config and print it with all defaults filled in");
  check->add_option("config", check_cfg, "run config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*exponents) return cmd_exponents(exp_p, exp_json);
    if (*validate) return cmd_validate(validate_m);
    if (*simulate) return cmd_simulate(sim_cfg, sim_out);
    if (*wave) return cmd_wave_op(wave_cfg, wave_out);
    if (*morawetz) return cmd_morawetz(mor_m, mor_dir, mor_t);
    if (*profiles) return cmd_profiles(prof_m, prof_dir);
    if (*sweep) return cmd_sweep(sweep_cfg, sweep_threads, sweep_csv);
    if (*ineq) return cmd_inequalities(ineq_seed, ineq_trials, ineq_p, ineq_fields, ineq_r);
    if (*check) return cmd_check_config(check_cfg);
  } catch (...) {
    std::string msg;
    const int code = nlsim::classify_exception(std::current_exception(), msg);
    std::cerr << "error: " << msg << "\n";
    return code;
  }
  return 2;
}
