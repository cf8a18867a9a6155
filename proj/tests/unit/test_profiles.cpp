#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nlsim/expression.hpp"
#include "nlsim/profiles.hpp"

using namespace nlsim;

namespace {

Field bump(const Grid1D& g, double amp, double x0, double sigma = 1.0) {
  return Field::from_function(g, [&](double x) {
    const double y = (x - x0) / sigma;
    return amp * std::exp(-y * y / 2.0);
  });
}

Field multiband(const Grid1D& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  Field f(g);
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = cplx(nd(rng), nd(rng));
  const auto bands = lp::dyadic_band(g);
  std::vector<double> weights(bands.size());
  for (auto& w : weights) w = std::pow(10.0, ud(rng));
  Field out(g);
  std::size_t i = 0;
  for (const auto& [N, piece] : littlewood_paley_pieces(f)) {
    Field scaled = piece;
    scaled *= cplx(weights[i++]);
    out += scaled;
  }
  return out;
}

}  // namespace

TEST(RefinedSobolev, ThetaAndTrivialCases) {
  EXPECT_DOUBLE_EQ(refined_sobolev_theta(4.0), 0.5);
  EXPECT_DOUBLE_EQ(refined_sobolev_theta(3.0), 1.0 / 3.0);
  EXPECT_NEAR(refined_sobolev_theta(12.0), 0.5 * (2.0 / 3.0 + 1.0 / 9.0), 1e-15);
  EXPECT_THROW(refined_sobolev_theta(2.0), DomainError);
  Grid1D g(256, 20.0);
  EXPECT_FALSE(refined_sobolev_ratio(Field(g), 4.0).applicable);
}

TEST(RefinedSobolev, SingleBandField) {
  Grid1D g(512, 20.0);
  std::mt19937_64 rng(51);
  std::normal_distribution<double> nd;
  Field f(g);
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = cplx(nd(rng), nd(rng));
  const Field piece = littlewood_paley(f, 4.0).field;
  const auto res = refined_sobolev_ratio(piece, 4.0);
  ASSERT_TRUE(res.applicable);
  // the smooth annulus symbol is 1 only at |k| = N, so neighbouring pieces leak a little
  EXPECT_LE(res.sup_piece, lebesgue_norm(piece, 4.0));
  EXPECT_NEAR(res.sup_piece, lebesgue_norm(piece, 4.0), 0.1 * res.sup_piece);
  const double expect = std::pow(lebesgue_norm(piece, 4.0) / h1_norm(piece), 1.0 - res.theta);
  EXPECT_NEAR(res.ratio, expect, 0.05 * expect);
}

TEST(RefinedSobolev, MonteCarloStableAcrossSeeds) {
  Grid1D g(128, 10.0);
  std::vector<double> maxima;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto res = refined_sobolev_ratio(multiband(g, rng), 4.0);
      ASSERT_TRUE(std::isfinite(res.ratio));
      worst = std::max(worst, res.ratio);
    }
    maxima.push_back(worst);
  }
  const auto [lo, hi] = std::minmax_element(maxima.begin(), maxima.end());
  EXPECT_LE((*hi - *lo) / *hi, 0.15);
}

TEST(Profiles, PlantedSingleBubble) {
  Grid1D g(2048, 128.0);
  std::vector<Field> seq;
  for (int n = 1; n <= 8; ++n) seq.push_back(bump(g, 1.0, 10.0 * n));
  const auto res = extract_bubble(seq);
  ASSERT_TRUE(res.found) << res.status;
  for (int n = 1; n <= 8; ++n) {
    EXPECT_LE(std::abs(res.bubble.x_shift[n - 1] - 10.0 * n), 2.0 * g.dx());
    EXPECT_EQ(res.bubble.t_shift[n - 1], 0.0);
  }
  EXPECT_LE(h1_norm(res.bubble.phi - bump(g, 1.0, 0.0)), 1e-3);
  // a second pass finds nothing
  const auto again = extract_bubble(res.residuals);
  EXPECT_FALSE(again.found);
  EXPECT_EQ(again.status, "no bubble");
  EXPECT_GT(res.alpha, 0.0);
  EXPECT_GT(res.kappa, 0.0);
}

TEST(Profiles, ZeroSequenceHasNoBubble) {
  Grid1D g(256, 20.0);
  const std::vector<Field> seq(4, Field(g));
  EXPECT_FALSE(extract_bubble(seq).found);
  EXPECT_THROW(extract_bubble(std::vector<Field>(3, Field(g))), StructuralError);
}

TEST(Profiles, TimeShiftedBubble) {
  Grid1D g(2048, 128.0);
  std::vector<Field> seq;
  // f_n = e^{-i t Delta} phi(. - x_n) with t = 2
  for (int n = 1; n <= 6; ++n) seq.push_back(free_evolve(bump(g, 1.0, 12.0 * n - 40.0), -2.0));
  const auto res = extract_bubble(seq);
  ASSERT_TRUE(res.found);
  for (int n = 1; n <= 6; ++n) {
    EXPECT_NEAR(res.bubble.t_shift[n - 1], 2.0, 1e-9);
    EXPECT_LE(std::abs(res.bubble.x_shift[n - 1] - (12.0 * n - 40.0)), 2.0 * g.dx());
  }
  EXPECT_LE(h1_norm(res.bubble.phi - bump(g, 1.0, 0.0)), 1e-3);
}

TEST(Profiles, PlantedTwoBubbles) {
  Grid1D g(4096, 256.0);
  std::vector<Field> seq;
  for (int n = 1; n <= 8; ++n) seq.push_back(bump(g, 1.0, 0.0) + bump(g, 0.6, 20.0 * n));
  const auto first = extract_bubble(seq);
  ASSERT_TRUE(first.found);
  EXPECT_LE(std::abs(first.bubble.x_shift.back()), 2.0 * g.dx());
  EXPECT_LE(h1_norm(first.bubble.phi - bump(g, 1.0, 0.0)), 1e-3);
  const double second_mass = mass(bump(g, 0.6, 0.0));
  for (const auto& w : first.residuals) EXPECT_NEAR(mass(w), second_mass, 0.01 * second_mass);

  const auto a = validate(Expression("exp(-x^2)"), g);
  const auto rep = decompose(seq, a);
  EXPECT_EQ(rep.bubbles.size(), 2u);
  EXPECT_LE(rep.remainder_norm_ratio, 0.1);
}

TEST(Decoupling, ExactForSingleBubble) {
  Grid1D g(1024, 64.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  Bubble b{bump(g, 1.0, 0.0), {}, {}, 1.0};
  std::vector<Field> seq, rem;
  for (int n = 0; n < 4; ++n) {
    b.t_shift.push_back(0.5 * n);
    b.x_shift.push_back(3.0 * n);
    seq.push_back(b.component(n));
    rem.emplace_back(g);
  }
  const auto rep = decoupling_check(seq, {b}, rem, a, 3.0);
  EXPECT_LE(rep.max_mass_residual, 1e-10);
  EXPECT_LE(rep.max_energy_residual, 1e-10);
}

TEST(Decoupling, SeparationControlsOverlap) {
  Grid1D g(2048, 128.0);
  const auto a = validate(Expression("exp(-x^2)"), g);
  auto residual = [&](double sep) {
    Bubble b1{bump(g, 1.0, 0.0), {}, {}, 1.0};
    Bubble b2 = b1;
    std::vector<Field> seq, rem;
    for (int n = 0; n < 4; ++n) {
      b1.t_shift.push_back(0.0);
      b2.t_shift.push_back(0.0);
      b1.x_shift.push_back(-0.5 * sep);
      b2.x_shift.push_back(0.5 * sep);
    }
    for (int n = 0; n < 4; ++n) {
      seq.push_back(b1.component(n) + b2.component(n));
      rem.emplace_back(g);
    }
    const auto rep = decoupling_check(seq, {b1, b2}, rem, a, 3.0);
    EXPECT_NEAR(rep.min_separation.front(), sep, 1e-12);
    return rep.max_mass_residual / rep.max_mass;
  };
  // overlap oracle: 2 Re<g, g(. - s)> / M = exp(-s^2/4) for unit Gaussians
  EXPECT_LE(residual(50.0), 1e-6);
  EXPECT_NEAR(residual(2.0), std::exp(-1.0) / (1.0 + std::exp(-1.0)), 1e-8);
  EXPECT_GT(residual(2.0), 0.01);
  double prev = residual(1.0);
  for (double s : {2.0, 4.0, 8.0}) {
    const double cur = residual(s);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(Profiles, SequenceDirectoryRoundTrip) {
  Grid1D g(256, 20.0);
  std::vector<Field> seq;
  for (int n = 0; n < 4; ++n) seq.push_back(bump(g, 1.0, n));
  const auto dir = std::filesystem::path(::testing::TempDir()) / "nlsim_seq";
  std::filesystem::remove_all(dir);
  write_checkpoint_directory(seq, dir);
  const auto back = read_checkpoint_directory(dir);
  ASSERT_EQ(back.size(), 4u);
  for (int n = 0; n < 4; ++n) EXPECT_EQ(l2_norm(back[n] - seq[n]), 0.0);
  std::filesystem::remove_all(dir);
}
