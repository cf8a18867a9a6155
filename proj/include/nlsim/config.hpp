#pragma once

// Run configuration: a JSON document with the sections grid, model, initial, solver,
// diagnostics, output, profiles, sweep and a top-level seed. Every key is optional and
// unknown keys are rejected. docs/config.schema.json describes the same layout.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsim/evolve.hpp"
#include "nlsim/profiles.hpp"

namespace nlsim {

class ConfigError : public StructuralError {
 public:
  using StructuralError::StructuralError;
};

struct GridConfig {
  std::size_t n = 1024;
  double L = 40.0;
};

struct ModelConfig {
  double p = 3.0;
  /// Closed-form a(x); ignored when a_file is set.
  std::string a = "exp(-x^2)";
  /// Two-column (x, a) sample file.
  std::string a_file;
  double tail_tol = 1e-8;
  bool unsafe_physics = false;
};

enum class InitialKind { Gaussian, Zero, Soliton, Checkpoint };

struct InitialConfig {
  InitialKind kind = InitialKind::Gaussian;
  /// gaussian: amplitude * exp(-(x-x0)^2 / (2 width^2)) * exp(i velocity x)
  double amplitude = 1.0;
  double width = 1.0;
  double x0 = 0.0;
  /// Phase slope; the group velocity of exp(i v x) under the Laplacian flow is 2v.
  double velocity = 0.0;
  /// Standard deviation of seeded complex white noise, low-passed to k_max/4.
  double noise = 0.0;
  /// checkpoint: path to an NLS1 file whose grid must match the grid section.
  std::string path;
};

struct OutputConfig {
  std::string dir = "out";
  std::string diagnostics = "diagnostics.ndjson";
  /// Checkpoint subdirectory; empty disables checkpoint files.
  std::string checkpoints = "checkpoints";
  std::string summary = "summary.json";
};

struct SweepAxes {
  std::vector<double> p;
  std::vector<double> amplitude;
  std::vector<double> x0;
};

struct RunConfig {
  GridConfig grid;
  ModelConfig model;
  InitialConfig initial;
  SolverConfig solver;
  OutputConfig output;
  ProfileOptions profiles;
  std::uint64_t seed = 0;
  SweepAxes sweep;
};

inline const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::Gaussian: return "gaussian";
    case InitialKind::Zero: return "zero";
    case InitialKind::Soliton: return "soliton";
    case InitialKind::Checkpoint: return "checkpoint";
  }
  return "gaussian";
}

namespace config_detail {

/// Reads keys of one JSON object, remembering which ones were consumed.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }
  const nlohmann::json& at(const std::string& key) const { return j_.at(key); }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!j_[key].is_number()) throw ConfigError(where(key) + ": expected a number");
    out = j_[key].get<double>();
    if (!std::isfinite(out)) throw ConfigError(where(key) + ": must be finite");
  }
  void count(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    if (!j_[key].is_number_integer() || j_[key].get<long long>() < 0) {
      throw ConfigError(where(key) + ": expected a nonnegative integer");
    }
    out = j_[key].get<std::size_t>();
  }
  void u64(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    if (!j_[key].is_number_integer() || j_[key].get<long long>() < 0) {
      throw ConfigError(where(key) + ": expected a nonnegative integer");
    }
    out = j_[key].get<std::uint64_t>();
  }
  void flag(const std::string& key, bool& out) {
    if (!has(key)) return;
    if (!j_[key].is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    out = j_[key].get<bool>();
  }
  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    if (!j_[key].is_string()) throw ConfigError(where(key) + ": expected a string");
    out = j_[key].get<std::string>();
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    if (!j_[key].is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    out.clear();
    for (const auto& v : j_[key]) {
      if (!v.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.push_back(v.get<double>());
    }
  }

  /// Rejects keys that were never consumed.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace config_detail

/// Checks value ranges that do not depend on the model (p, grid shape, solver intervals).
inline void check_config(const RunConfig& c) {
  (void)Grid1D(c.grid.n, c.grid.L);
  (void)exponents_for(c.model.p);
  c.solver.validate();
  if (c.initial.kind == InitialKind::Gaussian && !(c.initial.width > 0.0)) {
    throw DomainError("initial.width must be positive");
  }
  if (c.initial.noise < 0.0) throw DomainError("initial.noise must be nonnegative");
  if (c.initial.kind == InitialKind::Checkpoint && c.initial.path.empty()) {
    throw ConfigError("initial.path is required for kind 'checkpoint'");
  }
  if (c.model.a_file.empty() && c.model.a.empty()) throw ConfigError("model: one of a, a_file is required");
  for (double p : c.sweep.p) (void)exponents_for(p);
  if (!(c.profiles.time_step > 0.0) || !(c.profiles.time_window >= 0.0)) {
    throw DomainError("profiles: time_window must be nonnegative and time_step positive");
  }
  if (!(c.profiles.window_outer_radius > c.profiles.window_radius) || !(c.profiles.window_radius > 0.0)) {
    throw DomainError("profiles: need 0 < window_radius < window_outer_radius");
  }
}

inline RunConfig parse_config(const nlohmann::json& j) {
  using config_detail::Section;
  RunConfig c;
  Section root(j, "config");
  if (root.has("grid")) {
    Section s(root.at("grid"), "grid");
    s.count("n", c.grid.n);
    s.number("L", c.grid.L);
    s.finish();
  }
  if (root.has("model")) {
    Section s(root.at("model"), "model");
    s.number("p", c.model.p);
    s.text("a", c.model.a);
    s.text("a_file", c.model.a_file);
    s.number("tail_tol", c.model.tail_tol);
    s.flag("unsafe_physics", c.model.unsafe_physics);
    s.finish();
  }
  if (root.has("initial")) {
    Section s(root.at("initial"), "initial");
    std::string kind = to_string(c.initial.kind);
    s.text("kind", kind);
    if (kind == "gaussian") c.initial.kind = InitialKind::Gaussian;
    else if (kind == "zero") c.initial.kind = InitialKind::Zero;
    else if (kind == "soliton") c.initial.kind = InitialKind::Soliton;
    else if (kind == "checkpoint") c.initial.kind = InitialKind::Checkpoint;
    else throw ConfigError("initial.kind: expected gaussian, zero, soliton or checkpoint, got '" + kind + "'");
    s.number("amplitude", c.initial.amplitude);
    s.number("width", c.initial.width);
    s.number("x0", c.initial.x0);
    s.number("velocity", c.initial.velocity);
    s.number("noise", c.initial.noise);
    s.text("path", c.initial.path);
    s.finish();
  }
  if (root.has("solver")) {
    Section s(root.at("solver"), "solver");
    auto& v = c.solver;
    std::string scheme = "strang";
    s.text("scheme", scheme);
    if (scheme != "strang") throw ConfigError("solver.scheme: only 'strang' is available");
    s.number("dt", v.dt);
    s.number("t_end", v.t_end);
    s.count("checkpoint_every", v.checkpoint_every);
    s.count("diagnostics_every", v.diagnostics_every);
    s.number("boundary_mass_tol", v.boundary_mass_tol);
    s.flag("stop_on_boundary", v.stop_on_boundary);
    s.number("t_big", v.t_big);
    s.count("max_iters", v.max_iters);
    s.number("correction_tol", v.correction_tol);
    s.number("scattering_tol", v.scattering_tol);
    s.number("t_min", v.t_min);
    s.finish();
  }
  if (root.has("diagnostics")) {
    Section s(root.at("diagnostics"), "diagnostics");
    s.flag("morawetz", c.solver.toggles.morawetz);
    s.flag("z_norm", c.solver.toggles.z_norm);
    s.flag("scattering_norm", c.solver.toggles.scattering_norm);
    s.finish();
  }
  if (root.has("output")) {
    Section s(root.at("output"), "output");
    s.text("dir", c.output.dir);
    s.text("diagnostics", c.output.diagnostics);
    s.text("checkpoints", c.output.checkpoints);
    s.text("summary", c.output.summary);
    s.finish();
  }
  if (root.has("profiles")) {
    Section s(root.at("profiles"), "profiles");
    auto& o = c.profiles;
    s.number("time_window", o.time_window);
    s.number("time_step", o.time_step);
    s.number("detection_threshold", o.detection_threshold);
    s.number("window_radius", o.window_radius);
    s.number("window_outer_radius", o.window_outer_radius);
    s.number("truncation_octaves", o.truncation_octaves);
    s.count("max_bubbles", o.max_bubbles);
    s.finish();
  }
  root.u64("seed", c.seed);
  if (root.has("sweep")) {
    Section s(root.at("sweep"), "sweep");
    s.numbers("p", c.sweep.p);
    s.numbers("amplitude", c.sweep.amplitude);
    s.numbers("x0", c.sweep.x0);
    s.finish();
  }
  root.finish();
  c.solver.unsafe_physics = c.model.unsafe_physics;
  c.profiles.p = c.model.p;
  check_config(c);
  return c;
}

/// Full serialization: every field is written, so parse(to_json(c)) reproduces c.
inline nlohmann::json to_json(const RunConfig& c) {
  const auto& v = c.solver;
  const auto& o = c.profiles;
  return {
      {"grid", {{"n", c.grid.n}, {"L", c.grid.L}}},
      {"model",
       {{"p", c.model.p},
        {"a", c.model.a},
        {"a_file", c.model.a_file},
        {"tail_tol", c.model.tail_tol},
        {"unsafe_physics", c.model.unsafe_physics}}},
      {"initial",
       {{"kind", to_string(c.initial.kind)},
        {"amplitude", c.initial.amplitude},
        {"width", c.initial.width},
        {"x0", c.initial.x0},
        {"velocity", c.initial.velocity},
        {"noise", c.initial.noise},
        {"path", c.initial.path}}},
      {"solver",
       {{"scheme", "strang"},
        {"dt", v.dt},
        {"t_end", v.t_end},
        {"checkpoint_every", v.checkpoint_every},
        {"diagnostics_every", v.diagnostics_every},
        {"boundary_mass_tol", v.boundary_mass_tol},
        {"stop_on_boundary", v.stop_on_boundary},
        {"t_big", v.t_big},
        {"max_iters", v.max_iters},
        {"correction_tol", v.correction_tol},
        {"scattering_tol", v.scattering_tol},
        {"t_min", v.t_min}}},
      {"diagnostics",
       {{"morawetz", v.toggles.morawetz}, {"z_norm", v.toggles.z_norm}, {"scattering_norm", v.toggles.scattering_norm}}},
      {"output",
       {{"dir", c.output.dir},
        {"diagnostics", c.output.diagnostics},
        {"checkpoints", c.output.checkpoints},
        {"summary", c.output.summary}}},
      {"profiles",
       {{"time_window", o.time_window},
        {"time_step", o.time_step},
        {"detection_threshold", o.detection_threshold},
        {"window_radius", o.window_radius},
        {"window_outer_radius", o.window_outer_radius},
        {"truncation_octaves", o.truncation_octaves},
        {"max_bubbles", o.max_bubbles}}},
      {"seed", c.seed},
      {"sweep", {{"p", c.sweep.p}, {"amplitude", c.sweep.amplitude}, {"x0", c.sweep.x0}}}};
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Loads a config file; a relative a_file or initial.path is resolved against the file's directory.
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config_text(ss.str());
  const auto base = path.parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative() && !base.empty()) p = (base / p).string();
  };
  resolve(c.model.a_file);
  resolve(c.initial.path);
  return c;
}

}  // namespace nlsim
