#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "nlsim/checkpoint_io.hpp"
#include "nlsim/evolve.hpp"
#include "nlsim/expression.hpp"

using namespace nlsim;

namespace {

Field gaussian(const Grid1D& g, double amp, double x0 = 0.0) {
  return Field::from_function(g, [&](double x) { return amp * std::exp(-(x - x0) * (x - x0) / 2.0); });
}

Field random_field(const Grid1D& g, std::mt19937_64& rng, double kcut) {
  std::normal_distribution<double> nd;
  Field f(g);
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = cplx(nd(rng), nd(rng));
  return apply_multiplier(f, [&](double k, std::size_t) { return std::abs(k) <= kcut ? 1.0 : 0.0; });
}

SolverConfig quiet(double dt, double t_end) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.checkpoint_every = 1;
  cfg.diagnostics_every = 1;
  cfg.stop_on_boundary = false;
  return cfg;
}

}  // namespace

TEST(Strang, ZeroPotentialIsFreeFlow) {
  Grid1D g(256, 10.0);
  std::mt19937_64 rng(31);
  const Field u = random_field(g, rng, 10.0);
  const auto zero = constant_inhomogeneity(g, 0.0);
  const Field a = step_strang(u, zero, 3.0, 0.01);
  EXPECT_LT(l2_norm(a - free_evolve(u, 0.01)), 1e-13 * l2_norm(u));
  EXPECT_DOUBLE_EQ(a.time(), 0.01);
}

TEST(Strang, SingleStepConservesMass) {
  Grid1D g(256, 10.0);
  std::mt19937_64 rng(32);
  const Field u = random_field(g, rng, 10.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  EXPECT_NEAR(mass(step_strang(u, a, 3.0, 0.01)), mass(u), 1e-14 * mass(u));
}

TEST(Strang, TimeReversal) {
  Grid1D g(512, 20.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  const Field u = gaussian(g, 1.0);
  const Field back = step_strang(step_strang(u, a, 3.0, 0.01), a, 3.0, -0.01);
  EXPECT_LT(l2_norm(back - u), 1e-11);
}

TEST(Strang, NonFiniteAborts) {
  Grid1D g(64, 5.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  Field u = gaussian(g, 1.0);
  u[3] = cplx(std::numeric_limits<double>::infinity(), 0.0);
  EXPECT_THROW(step_strang(u, a, 3.0, 0.01), SolverAbort);
}

TEST(Strang, SecondOrderConvergence) {
  Grid1D g(512, 20.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  const Field u0 = gaussian(g, 1.0);
  auto run = [&](double dt) { return integrate(u0, a, 3.0, dt, static_cast<std::size_t>(std::llround(1.0 / dt))); };
  const double dt = 0.02;
  const Field ref = run(dt / 8.0);
  const double e1 = l2_norm(run(dt) - ref);
  const double e2 = l2_norm(run(dt / 2.0) - ref);
  EXPECT_GE(e1 / e2, 3.6);
  EXPECT_LE(e1 / e2, 4.4);
}

TEST(SolveIvp, ZeroDataStaysZero) {
  Grid1D g(128, 10.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  const auto traj = solve_ivp(Field(g), a, 3.0, quiet(0.01, 2.0));
  for (const auto& c : traj.checkpoints) EXPECT_EQ(l2_norm(c), 0.0);
  for (const auto& r : traj.diagnostics) {
    EXPECT_EQ(r.mass, 0.0);
    EXPECT_EQ(r.energy, 0.0);
  }
  EXPECT_FALSE(traj.boundary_violation);
}

TEST(SolveIvp, MassDriftWithinRoundoff) {
  Grid1D g(512, 20.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  auto cfg = quiet(0.01, 5.0);
  cfg.checkpoint_every = 100;
  cfg.diagnostics_every = 10;
  const auto traj = solve_ivp(gaussian(g, 1.0), a, 3.0, cfg);
  const double m0 = traj.diagnostics.front().mass;
  for (const auto& r : traj.diagnostics) EXPECT_LT(std::abs(r.mass - m0), 1e-12 * 500 * m0);
  // strictly increasing checkpoints including the final state
  for (std::size_t i = 1; i < traj.checkpoints.size(); ++i) {
    EXPECT_GT(traj.checkpoints[i].time(), traj.checkpoints[i - 1].time());
  }
  EXPECT_NEAR(traj.final_time(), 5.0, 1e-12);
}

TEST(SolveIvp, EnergyDriftIsSecondOrder) {
  Grid1D g(512, 20.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  auto drift = [&](double dt) {
    auto cfg = quiet(dt, 2.0);
    cfg.checkpoint_every = 1000000;
    cfg.diagnostics_every = 1;
    const auto traj = solve_ivp(gaussian(g, 1.0), a, 3.0, cfg);
    const double e0 = traj.diagnostics.front().energy;
    double worst = 0.0;
    for (const auto& r : traj.diagnostics) worst = std::max(worst, std::abs(r.energy - e0) / e0);
    return worst;
  };
  EXPECT_GE(drift(0.02) / drift(0.01), 3.5);
}

TEST(SolveIvp, DuhamelResidualIsSecondOrder) {
  Grid1D g(512, 20.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  auto residual = [&](double dt) {
    const auto traj = solve_ivp(gaussian(g, 1.0), a, 3.0, quiet(dt, 0.5));
    return duhamel_residual(traj, a, 3.0, traj.checkpoints.size() - 1);
  };
  const double r1 = residual(0.02);
  const double r2 = residual(0.01);
  EXPECT_LT(r1, 0.02 * 0.02 * 10.0);
  EXPECT_GE(r1 / r2, 3.0);
}

TEST(SolveIvp, InadmissibleNeedsUnsafeFlag) {
  Grid1D g(128, 10.0);
  const auto one = constant_inhomogeneity(g, 1.0);
  auto cfg = quiet(0.01, 0.1);
  EXPECT_THROW(solve_ivp(gaussian(g, 0.1), one, 3.0, cfg), DomainError);
  EXPECT_NO_THROW(solve_ivp(gaussian(g, 0.1), one, 5.0, cfg));
  cfg.unsafe_physics = true;
  EXPECT_NO_THROW(solve_ivp(gaussian(g, 0.1), one, 3.0, cfg));
  EXPECT_THROW(solve_ivp(gaussian(g, 0.1), one, 2.0, cfg), DomainError);
}

TEST(SolveIvp, BoundaryViolationPolicies) {
  Grid1D g(128, 6.0);
  const auto a = validate(Expression("exp(-x^2)"), g, 1.0);
  auto cfg = quiet(0.01, 3.0);
  cfg.checkpoint_every = 50;
  cfg.stop_on_boundary = true;
  const auto stopped = solve_ivp(gaussian(g, 1.0), a, 3.0, cfg);
  EXPECT_TRUE(stopped.boundary_violation);
  EXPECT_TRUE(stopped.stopped_early);
  EXPECT_LT(stopped.final_time(), 3.0);
  EXPECT_EQ(stopped.final_time(), stopped.boundary_violation_time);

  cfg.stop_on_boundary = false;
  const auto warned = solve_ivp(gaussian(g, 1.0), a, 3.0, cfg);
  EXPECT_TRUE(warned.boundary_violation);
  EXPECT_FALSE(warned.stopped_early);
  EXPECT_NEAR(warned.final_time(), 3.0, 1e-12);
}

TEST(SolveIvp, ObserverSeesEveryStep) {
  Grid1D g(64, 10.0);
  const auto a = validate(Expression("exp(-x^2)"), g, 1e-6);
  std::size_t calls = 0;
  solve_ivp(gaussian(g, 0.5), a, 3.0, quiet(0.1, 1.0), [&](const Field&, std::size_t s) {
    EXPECT_EQ(s, calls);
    ++calls;
  });
  EXPECT_EQ(calls, 11u);
}

TEST(Scattering, FreeStreamsHaveZeroResidual) {
  Grid1D g(512, 40.0);
  const auto zero = constant_inhomogeneity(g, 0.0);
  const Field phi = gaussian(g, 1.0);
  auto cfg = quiet(0.05, 4.0);
  cfg.checkpoint_every = 10;
  const auto traj = solve_ivp(phi, zero, 3.0, cfg);
  const auto st = extract_scattering_state(traj, cfg);
  for (double r : st.residuals) EXPECT_LT(r, 1e-12);
  EXPECT_TRUE(st.scattered);
  EXPECT_LT(h1_norm(st.u_plus - phi), 1e-12);

  // linear stream built directly
  Trajectory lin;
  for (int i = 0; i <= 5; ++i) lin.checkpoints.push_back(free_evolve(phi, 0.7 * i));
  const auto st2 = extract_scattering_state(lin, cfg);
  EXPECT_LT(h1_norm(st2.u_plus - phi), 1e-12);

  Trajectory shortt;
  shortt.checkpoints.push_back(phi);
  EXPECT_THROW(extract_scattering_state(shortt, cfg), StructuralError);
}

TEST(Scattering, InsufficientAndIncreasingResiduals) {
  Grid1D g(128, 10.0);
  SolverConfig cfg;
  Trajectory t;
  const Field phi = gaussian(g, 1.0);
  for (int i = 0; i < 3; ++i) t.checkpoints.push_back(free_evolve(phi, i));
  EXPECT_FALSE(extract_scattering_state(t, cfg).scattered);
  EXPECT_EQ(extract_scattering_state(t, cfg).status, "insufficient samples");

  Trajectory grow;
  for (int i = 0; i < 5; ++i) {
    Field f = free_evolve(cplx(1.0 + 0.1 * i * i) * phi, i);
    grow.checkpoints.push_back(f);
  }
  const auto st = extract_scattering_state(grow, cfg);
  EXPECT_FALSE(st.scattered);
}

TEST(FinalState, FreeAndZeroCases) {
  Grid1D g(512, 40.0);
  const auto zero = constant_inhomogeneity(g, 0.0);
  const Field up = gaussian(g, 0.5);
  auto cfg = quiet(0.05, 1.0);
  cfg.checkpoint_every = 20;
  cfg.t_big = 4.0;
  const auto res = solve_final_state(up, zero, 3.0, cfg);
  for (const auto& c : res.trajectory.checkpoints) {
    EXPECT_LT(l2_norm(c - free_evolve(up, c.time())), 1e-12);
  }
  EXPECT_EQ(res.iterations, 1u);

  const auto a = validate(Expression("exp(-x^2)"), g);
  const auto z = solve_final_state(Field(g), a, 3.0, cfg);
  for (const auto& c : z.trajectory.checkpoints) EXPECT_EQ(l2_norm(c), 0.0);
}

TEST(FinalState, RoundTripRecoversAsymptoticState) {
  Grid1D g(1024, 64.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  Field up = gaussian(g, 1.0);
  up *= cplx(0.1 / h1_norm(up));
  auto cfg = quiet(0.01, 1.0);
  cfg.checkpoint_every = 100;
  cfg.diagnostics_every = 100;
  cfg.t_big = 5.0;
  const auto res = solve_final_state(up, a, 3.0, cfg);
  cfg.t_min = 3.0;
  const auto st = extract_scattering_state(res.trajectory, cfg);
  EXPECT_LT(h1_norm(st.u_plus - up), 1e-4);
}

TEST(FarProfile, DistanceDecreasesWithTranslation) {
  Grid1D g(2048, 128.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  auto cfg = quiet(0.01, 5.0);
  cfg.checkpoint_every = 1000;
  cfg.diagnostics_every = 100;
  std::vector<double> d;
  for (double x0 : {5.0, 10.0, 20.0}) d.push_back(free_distance(solve_ivp(gaussian(g, 1.0, x0), a, 3.0, cfg)));
  EXPECT_LE(d[1], d[0] + 1e-3);
  EXPECT_LE(d[2], d[1] + 1e-3);
  EXPECT_LT(d[2], d[0]);
}

TEST(Checkpoint, BitExactRoundTrip) {
  Grid1D g(64, 3.25);
  std::mt19937_64 rng(33);
  Field f = random_field(g, rng, 100.0);
  f.set_time(1.0 / 3.0);
  const auto dir = std::filesystem::path(::testing::TempDir()) / "nlsim_ckpt";
  std::filesystem::remove_all(dir);
  write_checkpoint_directory({f, free_evolve(f, 0.5)}, dir);
  const auto back = read_checkpoint_directory(dir);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].grid(), g);
  EXPECT_EQ(back[0].time(), f.time());
  for (std::size_t j = 0; j < g.n(); ++j) {
    EXPECT_EQ(std::memcmp(&back[0].data()[j], &f.data()[j], sizeof(cplx)), 0);
  }
  EXPECT_EQ(std::filesystem::file_size(dir / "ckpt_000000.nls1"), 4 + 4 + 8 + 8 + 8 + 64 * 16u);
  {
    std::ofstream bad(dir / "bad.nls1", std::ios::binary);
    bad << "NLS2";
  }
  EXPECT_THROW(read_checkpoint(dir / "bad.nls1"), StructuralError);
  std::filesystem::resize_file(dir / "ckpt_000001.nls1", 100);
  EXPECT_THROW(read_checkpoint(dir / "ckpt_000001.nls1"), StructuralError);
  std::filesystem::remove_all(dir);
}
