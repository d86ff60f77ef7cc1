#include "sli/estimators.hpp"
#include "sli/li_engine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace sli {
namespace {

TEST(BinomialOracle, SuccessProbability) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  const double p = 1.0 - std::exp(-0.02);
  EXPECT_NEAR(p, 0.01980133, 1e-8);
  EXPECT_NEAR(binomial_oracle(li, 1.0, 1), 125 * p * std::pow(1 - p, 124), 1e-15);
}

TEST(BinomialOracle, ZeroDefaults) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  EXPECT_NEAR(binomial_oracle(li, 1.0, 0), std::exp(-2.5), 1e-15);
  EXPECT_NEAR(binomial_oracle(li, 1.0, 0), 0.082085, 1e-6);
}

TEST(BinomialOracle, DiracAtTimeZero) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  EXPECT_EQ(binomial_oracle(li, 0.0, 0), 1.0);
  EXPECT_EQ(binomial_oracle(li, 0.0, 3), 0.0);
}

TEST(BinomialOracle, PmfSumsToOne) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  const auto pmf = binomial_oracle_pmf(li, 1.0);
  ASSERT_EQ(pmf.size(), 126u);
  EXPECT_NEAR(std::accumulate(pmf.begin(), pmf.end(), 0.0), 1.0, 1e-14);
}

TEST(BinomialOracle, TableIsUnsupported) {
  const auto li = LocalIntensity::table({{{0.0, 1.0}}, {{0.0, 0.0}}}, 1.0);
  EXPECT_THROW(binomial_oracle(li, 1.0, 0), DomainError);
}

TEST(LiEngine, ZeroIntensityNoJumps) {
  ModelParams p;
  Model m{p, LocalIntensity::zero(p.m, p.horizon), ClampF{}};
  Rng g(1);
  for (int k = 0; k < 100; ++k) EXPECT_TRUE(simulate_li_path(m, 0, g).jump_times.empty());
}

TEST(LiEngine, StartAtTopNoJumps) {
  const Model m = make_linear_decay_model(ModelParams{});
  Rng g(1);
  const auto path = simulate_li_path(m, 125, g);
  EXPECT_TRUE(path.jump_times.empty());
  EXPECT_EQ(path.x_terminal, 125);
}

TEST(LiEngine, MatchesBinomialWithinBands) {
  const Model m = make_linear_decay_model(ModelParams{});
  const std::size_t n = 50000;
  const auto paths = simulate_li_paths(m, n, 0, 2024);
  const auto pmf = marginal_pmf(paths, 125);
  const auto oracle = binomial_oracle_pmf(m.intensity, 1.0);
  for (int k = 0; k <= 125; ++k) {
    if (oracle[k] * n < 5.0) continue;
    const double se = std::sqrt(oracle[k] * (1.0 - oracle[k]) / n);
    EXPECT_NEAR(pmf.probs[k], oracle[k], 4.0 * se) << "k = " << k;
  }
  EXPECT_LT(total_variation(pmf.probs, oracle), 0.01);
}

TEST(LiEngine, DeterministicGivenSeed) {
  const Model m = make_linear_decay_model(ModelParams{});
  const auto a = simulate_li_paths(m, 500, 0, 7, 1);
  const auto b = simulate_li_paths(m, 500, 0, 7, 0);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i].jump_times, b[i].jump_times);
}

}  // namespace
}  // namespace sli
