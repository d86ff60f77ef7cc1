#include "sli/estimators.hpp"
#include "sli/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace sli {
namespace {

PathRecord path(std::vector<double> jumps) {
  PathRecord p;
  p.x_terminal = static_cast<int>(jumps.size());
  p.jump_times = std::move(jumps);
  return p;
}

TEST(Asian, NoJumps) { EXPECT_EQ(asian_payoff(path({}), 0.0, 1.0), 0.0); }

TEST(Asian, SingleJump) { EXPECT_DOUBLE_EQ(asian_payoff(path({0.5}), 0.0, 1.0), 0.5); }

TEST(Asian, TwoJumpsWithStrike) {
  EXPECT_DOUBLE_EQ(asian_payoff(path({0.2, 0.8}), 0.5, 1.0), 0.5);
}

TEST(Asian, OutOfTheMoney) { EXPECT_EQ(asian_payoff(path({0.9}), 1.0, 1.0), 0.0); }

TEST(Asian, MatchesQuadratureOfStepPath) {
  Rng g(12);
  for (int trial = 0; trial < 500; ++trial) {
    const double horizon = 0.5 + 2.0 * uniform01(g);
    std::vector<double> jumps;
    double t = 0.0;
    while ((t += 0.3 * uniform01(g)) < horizon) jumps.push_back(t);
    const auto p = path(jumps);
    // Integrate the step function exactly segment by segment.
    double integral = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      integral += static_cast<double>(k) * (jumps[k] - prev);
      prev = jumps[k];
    }
    integral += static_cast<double>(jumps.size()) * (horizon - prev);
    const double strike = 3.0 * uniform01(g);
    const double expected = std::max(0.0, integral / horizon - strike);
    EXPECT_NEAR(asian_payoff(p, strike, horizon), expected, 1e-12);
  }
}

TEST(LongestGap, NoJumpsIsHorizon) { EXPECT_DOUBLE_EQ(longest_gap(path({}), 2.0), 2.0); }

TEST(LongestGap, SingleJump) { EXPECT_DOUBLE_EQ(longest_gap(path({0.6}), 2.0), 1.4); }

TEST(LongestGap, EqualGaps) { EXPECT_DOUBLE_EQ(longest_gap(path({0.5, 1.0, 1.5}), 2.0), 0.5); }

TEST(LongestGap, LeadingGapCounts) {
  EXPECT_DOUBLE_EQ(longest_gap(path({1.5, 1.7}), 2.0), 1.5);
}

TEST(LongestGap, BoundaryConventions) {
  const auto p = path({0.9, 1.0, 1.2});
  EXPECT_DOUBLE_EQ(longest_gap(p, 2.0, GapConvention::closed), 0.9);
  EXPECT_DOUBLE_EQ(longest_gap(p, 2.0, GapConvention::skip_first), 0.8);
  EXPECT_DOUBLE_EQ(longest_gap(p, 2.0, GapConvention::skip_last), 0.9);
  const auto q = path({0.2, 0.5});
  EXPECT_DOUBLE_EQ(longest_gap(q, 2.0, GapConvention::skip_last), 0.3);
  EXPECT_DOUBLE_EQ(longest_gap(path({}), 2.0, GapConvention::skip_last), 2.0);
}

TEST(LongestGap, WithinHorizon) {
  Rng g(2);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> jumps;
    double t = 0.0;
    while ((t += uniform01(g)) < 2.0) jumps.push_back(t);
    const double tau = longest_gap(path(jumps), 2.0);
    EXPECT_GT(tau, 0.0);
    EXPECT_LE(tau, 2.0);
  }
}

TEST(TauCdf, ThresholdAtHorizonIsOne) {
  std::vector<PathRecord> paths{path({0.3}), path({}), path({1.0, 1.1})};
  const std::vector<double> th{2.0, 1.0};
  const auto cdf = tau_cdf(paths, th, 2.0);
  EXPECT_EQ(cdf[0].value, 1.0);
  EXPECT_EQ(cdf[0].std_error, 0.0);
  EXPECT_DOUBLE_EQ(cdf[1].value, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(cdf[1].std_error, std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 3.0));
}

TEST(MarginalPmf, DiracAtZero) {
  std::vector<PathRecord> paths(10, path({}));
  const auto pmf = marginal_pmf(paths, 3);
  EXPECT_EQ(pmf.probs, (std::vector<double>{1.0, 0.0, 0.0, 0.0}));
  for (double s : pmf.std_error) EXPECT_EQ(s, 0.0);
}

TEST(MarginalPmf, SinglePathIsOneHot) {
  std::vector<PathRecord> paths{path({0.1, 0.2})};
  const auto pmf = marginal_pmf(paths, 3);
  EXPECT_EQ(pmf.probs[2], 1.0);
  EXPECT_EQ(pmf.std_error[2], 0.0);
  EXPECT_THROW(marginal_pmf(std::vector<PathRecord>{}, 3), DomainError);
}

TEST(SampleMean, KnownValues) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = sample_mean(v);
  EXPECT_DOUBLE_EQ(m.value, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt((5.0 / 3.0) / 4.0), 1e-15);
}

TEST(TotalVariation, Basic) {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> q{1.0};
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.5);
  EXPECT_EQ(total_variation(p, p), 0.0);
}

}  // namespace
}  // namespace sli
