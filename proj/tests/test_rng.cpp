#include "sli/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

namespace sli {
namespace {

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a(), b());
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    for (auto role : {StreamRole::brownian, StreamRole::jump_decision, StreamRole::proposals}) {
      seen.insert(derive_seed(7, i, role));
    }
  }
  EXPECT_EQ(seen.size(), 6000u);
  EXPECT_NE(derive_seed(1, 0, StreamRole::replication), derive_seed(2, 0, StreamRole::replication));
}

TEST(Rng, Uniform01Range) {
  Rng g(1);
  for (int k = 0; k < 100000; ++k) {
    const double u = uniform01(g);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = uniform_open0(g);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(Rng, ExponentialMean) {
  Rng g(3);
  const int n = 1000000;
  const double rate = 22.5;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += exponential(g, rate);
  const double mean = s / n;
  // sd of the mean is 1 / (rate sqrt(n))
  EXPECT_NEAR(mean, 1.0 / rate, 4.0 / (rate * std::sqrt(n)));
}

TEST(Rng, UniformIndexChiSquare) {
  Rng g(5);
  const std::uint64_t bins = 37;
  const int n = 370000;
  std::vector<int> counts(bins, 0);
  for (int k = 0; k < n; ++k) {
    const auto i = uniform_index(g, bins);
    ASSERT_LT(i, bins);
    ++counts[i];
  }
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 36 dof: the 0.999 quantile is about 67.99
  EXPECT_LT(chi2, 67.99);
}

TEST(Rng, UniformIndexOfOneIsZero) {
  Rng g(9);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(uniform_index(g, 1), 0u);
}

TEST(Rng, NormalMoments) {
  Rng g(11);
  const int n = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = std_normal(g);
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

}  // namespace
}  // namespace sli
