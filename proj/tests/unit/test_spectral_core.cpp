#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlsim/fft.hpp"
#include "nlsim/littlewood_paley.hpp"
#include "nlsim/norms.hpp"
#include "nlsim/propagator.hpp"
#include "nlsim/spacetime.hpp"

using namespace nlsim;

namespace {

Field random_field(const Grid1D& g, std::mt19937_64& rng, double kcut = 0.0) {
  std::normal_distribution<double> nd;
  Field f(g);
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = cplx(nd(rng), nd(rng));
  if (kcut > 0.0) f = apply_multiplier(f, [&](double k, std::size_t) { return std::abs(k) <= kcut ? 1.0 : 0.0; });
  return f;
}

Field gaussian(const Grid1D& g, double alpha) {
  return Field::from_function(g, [&](double x) { return std::exp(-alpha * x * x); });
}

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid1D(8, 1.0), DomainError);
  EXPECT_THROW(Grid1D(100, 1.0), DomainError);
  EXPECT_THROW(Grid1D(64, 0.0), DomainError);
  Grid1D g(64, 3.0);
  EXPECT_EQ(g.dx() * 64, 6.0);
  for (std::size_t j = 1; j < 32; ++j) EXPECT_EQ(g.wavenumber(j), -g.wavenumber(64 - j));
  EXPECT_DOUBLE_EQ(g.wavenumber(32), -g.k_max());
}

TEST(Field, LengthMismatchIsStructural) {
  Grid1D g(16, 1.0);
  EXPECT_THROW(Field(g, std::vector<cplx>(15)), StructuralError);
  EXPECT_THROW(Spectrum(g, std::vector<cplx>(17)), StructuralError);
}

TEST(Transform, ConstantConcentratesInZeroMode) {
  Grid1D g(256, 10.0);
  const auto s = transform(Field::from_function(g, [](double) { return 1.0; }));
  const double peak = std::abs(s[0]);
  for (std::size_t j = 1; j < g.n(); ++j) EXPECT_LT(std::abs(s[j]), 1e-12 * peak);
}

TEST(Transform, RoundTripAndPlancherel) {
  Grid1D g(512, 7.0);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Field f = random_field(g, rng);
    const auto s = transform(f);
    EXPECT_NEAR(s.l2_norm(), l2_norm(f), 1e-12 * l2_norm(f));
    const Field back = inverse_transform(s);
    EXPECT_LT(l2_norm(back - f), 1e-12 * l2_norm(f));
  }
}

TEST(Transform, GaussianMatchesClosedForm) {
  Grid1D g(1024, 40.0);
  const auto s = transform(gaussian(g, 0.5));
  double err = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double k = g.wavenumber(j);
    err = std::max(err, std::abs(s[j] - std::exp(-0.5 * k * k)));
  }
  EXPECT_LT(err, 1e-8);
}

TEST(Norms, ConstantAndGaussianValues) {
  Grid1D g(256, 10.0);
  const Field one = Field::from_function(g, [](double) { return 1.0; });
  EXPECT_NEAR(lebesgue_norm(one, 2.0), std::sqrt(20.0), 1e-12);
  EXPECT_EQ(lebesgue_norm(one, kInfinity), 1.0);
  Grid1D h(1024, 20.0);
  EXPECT_NEAR(lebesgue_norm(gaussian(h, 1.0), 2.0), std::pow(std::numbers::pi / 2.0, 0.25), 1e-8);
  EXPECT_THROW(lebesgue_norm(one, 0.5), DomainError);
}

TEST(Norms, SobolevCases) {
  Grid1D g(256, 5.0);
  std::mt19937_64 rng(2);
  const Field f = random_field(g, rng, 10.0);
  EXPECT_NEAR(sobolev_norm(f, 0.0), l2_norm(f), 1e-12 * l2_norm(f));
  const double direct = std::sqrt(std::pow(l2_norm(f), 2) + std::pow(l2_norm(derivative(f)), 2));
  EXPECT_NEAR(h1_norm(f), direct, 1e-10 * direct);

  const double k0 = g.wavenumber(7);
  const Field mode = Field::from_function(g, [&](double x) { return std::polar(1.0, k0 * x); });
  EXPECT_NEAR(h1_norm(mode), std::sqrt(1.0 + k0 * k0) * std::sqrt(10.0), 1e-10);
}

TEST(Norms, AbsoluteHomogeneity) {
  Grid1D g(128, 4.0);
  std::mt19937_64 rng(3);
  const Field f = random_field(g, rng);
  const cplx lam(-1.7, 0.4);
  const Field lf = lam * f;
  for (double r : {1.0, 2.0, 3.5, kInfinity}) {
    EXPECT_NEAR(lebesgue_norm(lf, r), std::abs(lam) * lebesgue_norm(f, r), 1e-12 * lebesgue_norm(lf, r));
  }
  EXPECT_NEAR(h1_norm(lf), std::abs(lam) * h1_norm(f), 1e-12 * h1_norm(lf));
}

TEST(Norms, SobolevEmbeddingConstantBounded) {
  Grid1D g(256, 10.0);
  std::mt19937_64 rng(4);
  for (double p : {3.0, 5.0, 6.0}) {
    const double r = exponents_for(p).r;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Field f = random_field(g, rng, 1.0 + 20.0 * (trial % 10) / 10.0);
      worst = std::max(worst, lebesgue_norm(f, r) / h1_norm(f));
    }
    // sup-norm bound ||f||_inf <= ||f||_H1 in one dimension, interpolated with L2
    EXPECT_LE(worst, 1.0) << "p = " << p;
  }
}

TEST(LittlewoodPaley, PartitionOfUnity) {
  Grid1D g(512, 8.0);
  std::mt19937_64 rng(5);
  const Field f = random_field(g, rng);
  Field sum(g);
  for (const auto& [N, piece] : littlewood_paley_pieces(f)) sum += piece;
  EXPECT_LT(l2_norm(sum - f), 1e-10 * l2_norm(f));

  Field sum2(g);
  for (double N : lp::dyadic_band(g)) {
    const auto proj = littlewood_paley(f, N);
    EXPECT_TRUE(proj.in_band);
    sum2 += proj.field;
  }
  EXPECT_LT(l2_norm(sum2 - f), 1e-10 * l2_norm(f));
}

TEST(LittlewoodPaley, SupportContainment) {
  Grid1D g(512, 8.0);
  std::mt19937_64 rng(6);
  const Field f = random_field(g, rng, 4.0);
  EXPECT_LT(l2_norm(low_pass(f, 16.0) - f), 1e-10 * l2_norm(f));
}

TEST(LittlewoodPaley, OutOfBandGivesFlaggedZero) {
  Grid1D g(64, 8.0);
  std::mt19937_64 rng(7);
  const Field f = random_field(g, rng);
  const auto proj = littlewood_paley(f, 1024.0);
  EXPECT_FALSE(proj.in_band);
  EXPECT_EQ(l2_norm(proj.field), 0.0);
  EXPECT_FALSE(littlewood_paley(f, 3.0).in_band);
}

TEST(LittlewoodPaley, IdempotentAwayFromTransition) {
  Grid1D g(512, 8.0);
  std::mt19937_64 rng(8);
  const double N = 8.0;
  // spectrum supported where the symbol is exactly 0 or 1
  const Field f = apply_multiplier(random_field(g, rng), [&](double k, std::size_t) {
    const double a = std::abs(k);
    return (a <= N || a >= 2.0 * N) ? 1.0 : 0.0;
  });
  const Field once = low_pass(f, N);
  EXPECT_LT(l2_norm(low_pass(once, N) - once), 1e-12 * l2_norm(once));

  // generic field: the defect is exactly the multiplier chi^2 - chi
  const Field h = random_field(g, rng);
  const Field hh = low_pass(low_pass(h, N), N) - low_pass(h, N);
  const Field oracle = apply_multiplier(h, [&](double k, std::size_t) {
    const double c = lp::low_pass_symbol(k, N);
    return c * c - c;
  });
  EXPECT_LT(l2_norm(hh - oracle), 1e-12 * l2_norm(h));
}

TEST(LittlewoodPaley, BernsteinConstant) {
  Grid1D g(1024, 16.0);
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Field f = random_field(g, rng);
    for (const auto& [N, piece] : littlewood_paley_pieces(f)) {
      const double l2 = l2_norm(piece);
      if (l2 == 0.0) continue;
      worst = std::max(worst, lebesgue_norm(piece, kInfinity) / (std::sqrt(N) * l2));
    }
  }
  EXPECT_LE(worst, 2.0);
}

TEST(LittlewoodPaley, CommutesWithFreeFlow) {
  Grid1D g(256, 8.0);
  std::mt19937_64 rng(10);
  const Field f = random_field(g, rng);
  for (double N : {1.0, 4.0, 16.0}) {
    const Field a = littlewood_paley(free_evolve(f, 0.7), N).field;
    const Field b = free_evolve(littlewood_paley(f, N).field, 0.7);
    EXPECT_LT(l2_norm(a - b), 1e-12 * l2_norm(f));
  }
}

TEST(Spacetime, TrivialStreams) {
  Grid1D g(64, 4.0);
  SpacetimeAccumulator zero(8.0, 4.0);
  for (int i = 0; i <= 10; ++i) zero.accumulate(Field(g, 0.1 * i));
  EXPECT_EQ(zero.value(), 0.0);

  SpacetimeAccumulator c(3.0, 2.0);
  for (int i = 0; i <= 10; ++i) c.accumulate(0.1 * i, 2.5);
  EXPECT_NEAR(c.value(), 2.5, 1e-12);

  SpacetimeAccumulator bad(2.0, 2.0);
  bad.accumulate(1.0, 1.0);
  EXPECT_THROW(bad.accumulate(0.5, 1.0), StructuralError);
  EXPECT_THROW(SpacetimeAccumulator(kInfinity, 2.0), DomainError);
}

TEST(Spacetime, FreeGaussianRefinement) {
  Grid1D g(1024, 60.0);
  const FreeFlow flow(gaussian(g, 0.5));
  auto run = [&](double dt) {
    SpacetimeAccumulator acc(8.0, 4.0);
    const auto steps = static_cast<int>(std::llround(10.0 / dt));
    for (int i = 0; i <= steps; ++i) acc.accumulate(flow.at(i * dt));
    return acc.value();
  };
  const double coarse = run(0.01);
  const double fine = run(0.001);
  EXPECT_LT(std::abs(coarse - fine), 0.005 * fine);
}
