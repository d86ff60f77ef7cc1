#include "sli/kernels.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

namespace sli {
namespace {

struct Fixture {
  std::vector<int> xs;
  std::vector<double> ys;
  std::vector<double> t_last;
  std::vector<Rng> streams;

  explicit Fixture(std::size_t n) {
    Rng g(1);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(static_cast<int>(uniform_index(g, 10)));
      ys.push_back(0.2 + uniform01(g));
      t_last.push_back(0.01 * uniform01(g));
      streams.push_back(make_stream(5, i, StreamRole::brownian));
    }
  }
};

class AdvanceKernel : public ::testing::TestWithParam<int> {};

TEST_P(AdvanceKernel, OmpMatchesSerialBitwise) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  const FactorDynamics dyn = GetParam() == 0 ? FactorDynamics{CirDynamics{}}
                                             : FactorDynamics{LogNormalDynamics{}};
  Fixture a(5000), b(5000);
  for (double target : {0.02, 0.03, 0.2}) {
    kernels::advance_factors_serial(dyn, li, a.xs, a.ys, a.t_last, a.streams, target, 0.01);
    kernels::advance_factors_omp(dyn, li, b.xs, b.ys, b.t_last, b.streams, target, 0.01);
  }
  EXPECT_EQ(a.ys, b.ys);
  EXPECT_EQ(a.t_last, b.t_last);
  EXPECT_EQ(a.streams, b.streams);
}

INSTANTIATE_TEST_SUITE_P(Dynamics, AdvanceKernel, ::testing::Values(0, 1),
                         [](const auto& info) {
                           return std::string(info.param == 0 ? "Cir" : "LogNormal");
                         });

TEST(AdvanceKernel, SkipsParticlesAlreadyThere) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  Fixture a(10);
  for (auto& t : a.t_last) t = 0.5;
  const auto ys = a.ys;
  kernels::advance_factors_serial(CirDynamics{}, li, a.xs, a.ys, a.t_last, a.streams, 0.5, 0.01);
  EXPECT_EQ(a.ys, ys);
}

TEST(AdvanceKernel, OmpPropagatesErrors) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  Fixture a(100);
  a.ys[37] = -1.0;
  EXPECT_THROW(kernels::advance_factors_omp(CirDynamics{}, li, a.xs, a.ys, a.t_last, a.streams,
                                            0.5, 0.01),
               DomainError);
}

TEST(Aggregates, RecomputeAndScanAgree) {
  Fixture a(3000);
  const ClampF f(1.0 / 3.0, 3.0);
  std::vector<std::int64_t> count(11);
  std::vector<double> fsum(11);
  kernels::recompute_aggregates(a.xs, a.ys, f, count, fsum);
  std::int64_t total = 0;
  for (int level = 0; level <= 10; ++level) {
    const auto s = kernels::scan_level(a.xs, a.ys, f, level);
    EXPECT_EQ(s.count, count[level]);
    EXPECT_EQ(s.fsum, fsum[level]);
    total += count[level];
  }
  EXPECT_EQ(total, 3000);
}

}  // namespace
}  // namespace sli
