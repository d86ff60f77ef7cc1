#include "sli/model.hpp"

#include <gtest/gtest.h>

namespace sli {
namespace {

TEST(LocalIntensity, LinearDecayValues) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  EXPECT_DOUBLE_EQ(li(0.0, 0), 2.5);
  EXPECT_DOUBLE_EQ(li(0.7, 125), 0.0);
  EXPECT_DOUBLE_EQ(li(0.3, 25), 2.0);
  EXPECT_DOUBLE_EQ(li.left_limit(0.3, 25), 2.0);
}

TEST(LocalIntensity, OutOfDomainThrows) {
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  EXPECT_THROW(li(0.5, 126), DomainError);
  EXPECT_THROW(li(0.5, -1), DomainError);
  EXPECT_THROW(li(-0.1, 0), DomainError);
  EXPECT_THROW(li(1.5, 0), DomainError);
}

TEST(LocalIntensity, TableRightContinuousWithLeftLimit) {
  std::vector<std::vector<IntensityPiece>> pieces{{{0.0, 1.0}, {0.5, 2.0}}, {{0.0, 0.0}}};
  const auto li = LocalIntensity::table(pieces, 1.0);
  EXPECT_DOUBLE_EQ(li(0.5, 0), 2.0);
  EXPECT_DOUBLE_EQ(li.left_limit(0.5, 0), 1.0);
  EXPECT_DOUBLE_EQ(li(0.25, 0), 1.0);
  EXPECT_DOUBLE_EQ(li(0.75, 1), 0.0);
}

TEST(ClampF, Clamps) {
  const ClampF f(1.0 / 3.0, 3.0);
  EXPECT_DOUBLE_EQ(f(0.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(f(10.0), 3.0);
  EXPECT_DOUBLE_EQ(f(1.0), 1.0);
}

TEST(ClampF, HookIsClampedToo) {
  const ClampF f(0.5, 2.0, [](double y) { return y * y; });
  EXPECT_TRUE(f.has_hook());
  EXPECT_DOUBLE_EQ(f(1.2), 1.44);
  EXPECT_DOUBLE_EQ(f(3.0), 2.0);
  EXPECT_DOUBLE_EQ(f(0.1), 0.5);
}

TEST(ValidateParams, DefaultSettingIsValid) {
  ModelParams p;
  const auto li = LocalIntensity::linear_decay(2.5, 125, 1.0);
  EXPECT_TRUE(validate_params(p, li).ok());
}

TEST(ValidateParams, ZeroFLowIsInvalid) {
  ModelParams p;
  p.f_low = 0.0;
  const auto r = validate_params(p, LocalIntensity::linear_decay(2.5, 125, 1.0));
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.to_string().find("strict positivity"), std::string::npos);
}

TEST(ValidateParams, TopLevelIntensityMustVanish) {
  ModelParams p;
  p.m = 2;
  std::vector<std::vector<IntensityPiece>> pieces{{{0.0, 1.0}}, {{0.0, 1.0}}, {{0.0, 0.1}}};
  const auto r = validate_params(p, LocalIntensity::table(pieces, 1.0));
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.to_string().find("lambda(t, M) = 0"), std::string::npos);
}

TEST(ValidateParams, BoundBelowSupremum) {
  ModelParams p;
  p.lambda_bar = 2.0;
  const auto r = validate_params(p, LocalIntensity::linear_decay(2.5, 125, 1.0));
  EXPECT_FALSE(r.ok());
  EXPECT_THROW(require_valid(p, LocalIntensity::linear_decay(2.5, 125, 1.0)), DomainError);
}

TEST(ValidateParams, InvertedBoundsAreInvalid) {
  ModelParams p;
  p.f_low = 3.0;
  p.f_high = 1.0;
  EXPECT_FALSE(validate_params(p, LocalIntensity::linear_decay(2.5, 125, 1.0)).ok());
}

TEST(Model, ProposalRate) {
  const Model m = make_linear_decay_model(ModelParams{});
  EXPECT_DOUBLE_EQ(m.proposal_rate(), 22.5);
}

}  // namespace
}  // namespace sli
