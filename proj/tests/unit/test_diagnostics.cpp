#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlsim/evolve.hpp"
#include "nlsim/expression.hpp"
#include "nlsim/trajectory_analysis.hpp"

using namespace nlsim;

namespace {

Field gaussian(const Grid1D& g, double amp, double kappa = 0.0) {
  return Field::from_function(g, [&](double x) { return amp * std::exp(-x * x / 2.0) * std::polar(1.0, kappa * x); });
}

Field random_field(const Grid1D& g, std::mt19937_64& rng, double kcut) {
  std::normal_distribution<double> nd;
  Field f(g);
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = cplx(nd(rng), nd(rng));
  f = apply_multiplier(f, [&](double k, std::size_t) { return std::abs(k) <= kcut ? 1.0 : 0.0; });
  // localize so that the weights see a compactly supported field
  for (std::size_t j = 0; j < g.n(); ++j) f[j] *= std::exp(-g.x(j) * g.x(j) / 8.0);
  return f;
}

}  // namespace

TEST(Morawetz, RealFieldAndZero) {
  Grid1D g(512, 20.0);
  const Field u = gaussian(g, 1.0);
  const double t = 1.5;
  double ref = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) ref += std::norm(u[j]) * t / std::hypot(t, g.x(j));
  ref *= g.dx();
  EXPECT_NEAR(morawetz_quantity(u, t), ref, 1e-14 * ref);
  EXPECT_GT(ref, 0.0);
  EXPECT_EQ(morawetz_quantity(Field(g), t), 0.0);
  EXPECT_THROW(morawetz_quantity(u, 0.5), DomainError);
  EXPECT_THROW(z_norm(u, 0.99), DomainError);
}

TEST(Morawetz, LinearPhaseRefinement) {
  auto at = [](std::size_t n) {
    Grid1D g(n, 20.0);
    return morawetz_quantity(gaussian(g, 1.0, 1.3), 2.0);
  };
  const double coarse = at(512);
  const double fine = at(2048);
  EXPECT_NEAR(coarse, fine, 1e-8 * std::abs(fine));
  // the momentum part is 2 kappa integral x/b |u|^2, which vanishes by symmetry
  Grid1D g(512, 20.0);
  EXPECT_NEAR(coarse, morawetz_quantity(gaussian(g, 1.0), 2.0), 1e-12);
}

TEST(Morawetz, DerivativeOfZeroAndTerms) {
  Grid1D g(256, 15.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  const auto d0 = morawetz_derivative(Field(g), 2.0, a, 3.0);
  EXPECT_EQ(d0.total, 0.0);
  EXPECT_EQ(d0.coercive, 0.0);
  EXPECT_THROW(morawetz_derivative(Field(g), 0.2, a, 3.0), DomainError);

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Field u = random_field(g, rng, 4.0);
    for (double t : {1.0, 3.0, 10.0}) {
      const auto d = morawetz_derivative(u, t, a, 3.0);
      const double galilean_terms = d.hessian + d.mixed + d.time_hessian;
      EXPECT_NEAR(d.galilean, galilean_terms, 1e-10 * std::max(1.0, d.galilean));
      EXPECT_GE(d.coercive, -1e-10);
      EXPECT_GE(d.repulsive, 0.0);
      EXPECT_EQ(d.angular, 0.0);
    }
  }
}

TEST(Morawetz, RepulsiveIntegrandPointwiseSign) {
  Grid1D g(256, 15.0);
  const auto a = validate(Expression("exp(-x^2) + sech(x)"), g);
  ASSERT_TRUE(a.report().repulsive);
  for (double t : {1.0, 4.0}) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double bx = g.x(j) / std::hypot(t, g.x(j));
      EXPECT_GE(-(4.0 / 5.0) * bx * a.derivative()[j], -1e-15);
    }
  }
}

TEST(Morawetz, BilaplacianBound) {
  Grid1D g(1024, 60.0);
  double worst = 0.0;
  for (double t = 1.0; t <= 100.0; t *= 1.3) {
    for (std::size_t j = 0; j < g.n(); ++j) worst = std::max(worst, std::abs(bilaplacian_weight(t, g.x(j))) * t * t * t);
  }
  EXPECT_LE(worst, 16.0);
  EXPECT_NEAR(worst, 3.0, 1e-12);  // attained at x = 0
  // compare with a finite-difference fourth derivative
  const double t = 2.0, x = 0.7, h = 1e-2;
  auto b = [&](double y) { return std::sqrt(t * t + y * y); };
  const double fd = (b(x + 2 * h) - 4 * b(x + h) + 6 * b(x) - 4 * b(x - h) + b(x - 2 * h)) / std::pow(h, 4);
  EXPECT_NEAR(bilaplacian_weight(t, x), fd, 1e-3);
}

TEST(Morawetz, FiniteDifferenceAlongFlow) {
  Grid1D g(1024, 30.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  const double p = 3.0, dt = 1e-3, t = 2.0;
  const auto steps = static_cast<std::size_t>(std::llround((t - dt) / dt));
  const Field before = integrate(gaussian(g, 1.0), a, p, dt, steps);
  const Field mid = integrate(before, a, p, dt, 1);
  const Field after = integrate(mid, a, p, dt, 1);
  const double fd = (morawetz_quantity(after, t + dt) - morawetz_quantity(before, t - dt)) / (2.0 * dt);
  const auto d = morawetz_derivative(mid, t, a, p);
  EXPECT_LE(std::abs(fd - d.total) / std::abs(d.total), 1e-3);
}

TEST(ZNorm, GalileanIdentityAndHomogeneity) {
  Grid1D g(1024, 20.0);
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const Field u = random_field(g, rng, 3.0);
    for (double t : {1.0, 2.0, 10.0}) {
      const double z = z_norm(u, t);
      EXPECT_NEAR(z_norm_galilean(u, t), z, 1e-10 * z);
      EXPECT_NEAR(z_norm(cplx(0.3, -2.0) * u, t), std::abs(cplx(0.3, -2.0)) * z, 1e-12 * z);
    }
  }
}

TEST(ZNorm, BoundedByH1) {
  Grid1D g(512, 20.0);
  std::mt19937_64 rng(43);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Field u = random_field(g, rng, 1.0 + trial % 8);
    for (double t : {1.0, 2.0, 5.0, 20.0, 100.0}) worst = std::max(worst, z_norm(u, t) / h1_norm(u));
  }
  EXPECT_LE(worst, 3.0);
}

TEST(ZNorm, LargeTimeLimit) {
  for (std::size_t n : {1024, 2048}) {
    Grid1D g(n, 20.0);
    const Field phi = gaussian(g, 1.0);
    const double target = 2.0 * l2_norm(derivative(phi));
    EXPECT_LE(std::abs(z_norm(phi, 100.0) - target), 0.05 * target);
  }
}

TEST(Records, NdjsonKeysAndNulls) {
  DiagnosticsRecord r;
  r.t = 0.5;
  r.mass = 1.0;
  const std::string line = r.to_ndjson();
  EXPECT_EQ(line,
            "{\"t\":0.5,\"mass\":1,\"energy\":0,\"h1\":0,\"morawetz\":null,\"z\":null,\"z_int\":0,\"pot_int\":0,"
            "\"scat_norm\":0}");
  const auto js = nlohmann::json::parse(line);
  EXPECT_TRUE(js["z"].is_null());
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
}

TEST(Records, MonitorIntegralsMonotone) {
  Grid1D g(1024, 40.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 6.0;
  cfg.diagnostics_every = 5;
  cfg.stop_on_boundary = false;
  const auto traj = solve_ivp(gaussian(g, 1.0), a, 3.0, cfg);
  for (std::size_t i = 1; i < traj.diagnostics.size(); ++i) {
    const auto& r0 = traj.diagnostics[i - 1];
    const auto& r1 = traj.diagnostics[i];
    EXPECT_GE(r1.z_int, r0.z_int);
    EXPECT_GE(r1.pot_int, r0.pot_int);
    EXPECT_GE(r1.scat_norm, r0.scat_norm);
    if (r1.t < 1.0) {
      EXPECT_TRUE(std::isnan(r1.z));
      EXPECT_EQ(r1.z_int, 0.0);
    } else {
      EXPECT_TRUE(std::isfinite(r1.z));
      EXPECT_TRUE(std::isfinite(r1.morawetz));
    }
  }
  // toggles off give null columns
  cfg.toggles = {false, false, false};
  const auto off = solve_ivp(gaussian(g, 1.0), a, 3.0, cfg);
  EXPECT_TRUE(std::isnan(off.diagnostics.back().z));
  EXPECT_TRUE(std::isnan(off.diagnostics.back().morawetz));
  EXPECT_TRUE(std::isnan(off.diagnostics.back().scat_norm));
  EXPECT_EQ(off.diagnostics.back().z_int, traj.diagnostics.back().z_int);
}

TEST(Analysis, ZeroSolutionAndShortRuns) {
  Grid1D g(128, 20.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 50.0;
  cfg.diagnostics_every = 5;
  const auto traj = solve_ivp(Field(g), a, 3.0, cfg);
  const auto rep = morawetz_integrals(traj, 50.0);
  EXPECT_EQ(rep.z_integral.back(), 0.0);
  EXPECT_EQ(rep.potential_integral.back(), 0.0);
  EXPECT_EQ(rep.z_plateau, 0.0);
  EXPECT_THROW(morawetz_integrals(traj, 60.0), DomainError);
  const auto probe = compactness_probe(traj);
  EXPECT_TRUE(probe.sufficient);
  EXPECT_EQ(probe.inf_z, 0.0);
  EXPECT_EQ(probe.z_at_one, 0.0);
}

TEST(Analysis, SnapshotReanalysisMatchesStream) {
  Grid1D g(512, 40.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 3.0;
  cfg.diagnostics_every = 10;
  cfg.checkpoint_every = 10;
  const auto traj = solve_ivp(gaussian(g, 1.0), a, 3.0, cfg);
  const auto recs = analyze_snapshots(traj.checkpoints, a, 3.0);
  ASSERT_EQ(recs.size(), traj.diagnostics.size());
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].to_ndjson(), traj.diagnostics[i].to_ndjson());
}
