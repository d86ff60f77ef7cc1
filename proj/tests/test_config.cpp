#include "sli/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace sli {
namespace {

const char* kLogNormalConfig = R"(version = 1
[model]
m = 125
lambda_bar = 2.5
f_low = 1/3
f_high = 3
horizon = 1
[factor]
kind = lognormal
y0 = 1
a = 1
sigma = 0.3
gamma = 1
[engine]
n = 50000
d = 100
)";

bool mentions(const ConfigError& e, const std::string& field) {
  for (const auto& s : e.errors()) {
    if (s.find(field) != std::string::npos) return true;
  }
  return false;
}

TEST(Config, LogNormalConfigIsValid) {
  const auto cfg = parse_config_string(kLogNormalConfig);
  EXPECT_EQ(cfg.factor.kind, "lognormal");
  EXPECT_DOUBLE_EQ(cfg.model.f_low, 1.0 / 3.0);
  EXPECT_EQ(cfg.engine.n, 50000u);
  EXPECT_TRUE(cfg.applied_defaults.empty());
  const auto setup = build_setup(cfg);
  EXPECT_DOUBLE_EQ(setup.model.proposal_rate(), 22.5);
  EXPECT_TRUE(std::holds_alternative<LogNormalDynamics>(setup.dynamics));
}

TEST(Config, NegativeCountNamesField) {
  try {
    parse_config_string("version = 1\n[engine]\nn = -5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "engine.n"));
  }
}

TEST(Config, MissingFBoundsAreDefaultedAndEchoed) {
  const auto cfg = parse_config_string("version = 1\n[model]\nhorizon = 2\n");
  EXPECT_DOUBLE_EQ(cfg.model.f_low, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(cfg.model.f_high, 3.0);
  ASSERT_EQ(cfg.applied_defaults.size(), 2u);
  EXPECT_NE(cfg.applied_defaults[0].find("model.f_low"), std::string::npos);
}

TEST(Config, UnknownKeysAndSections) {
  try {
    parse_config_string("version = 1\n[engine]\nparticles = 5\n[extra]\nx = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "engine.particles"));
    EXPECT_TRUE(mentions(e, "extra"));
  }
}

TEST(Config, SemanticErrors) {
  try {
    parse_config_string("version = 1\n[model]\nf_low = 0\n[factor]\ny0 = -1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "factor.y0"));
  }
  try {
    parse_config_string("version = 1\n[model]\nf_low = 0\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "strict positivity"));
  }
  EXPECT_THROW(parse_config_string("version = 2\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version = 1\n[engine]\nalgorithm = fast\n"), ConfigError);
  EXPECT_THROW(parse_config_string("version = 1\n[experiment]\nn_values = 200, 100\n"), ConfigError);
}

TEST(Config, MalformedSyntax) {
  EXPECT_THROW(parse_config_string("[model\nm = 3\n"), ConfigError);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(parse_config("/nonexistent/sli.ini"), ConfigError);
}

TEST(Config, RoundTripIsIdentity) {
  auto cfg = parse_config_string(std::string(kLogNormalConfig) +
                                 "seed = 18446744073709551615\nx_pmf = \n[experiment]\n"
                                 "n_values = 100:400:100, 800\ntau_thresholds = 0.1, 0.3\n"
                                 "estimators = asian, pmf-point\n");
  EXPECT_EQ(cfg.engine.seed, 18446744073709551615ULL);
  EXPECT_EQ(cfg.experiment.n_values, (std::vector<std::size_t>{100, 200, 300, 400, 800}));
  const auto text = serialize_config(cfg);
  const auto again = parse_config_string(text);
  EXPECT_EQ(again, cfg);
  EXPECT_EQ(serialize_config(again), text);
  EXPECT_EQ(config_hash(again), config_hash(cfg));
  auto other = cfg;
  other.engine.seed = 1;
  EXPECT_NE(config_hash(other), config_hash(cfg));
}

TEST(Config, IntensityTableFromCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "sli_config_table";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "li.csv");
    out << "level,start,value\n0,0,1.0\n0,0.5,2.0\n1,0,0.5\n2,0,0\n";
  }
  {
    std::ofstream out(dir / "bad.csv");
    out << "level,start,value\n0,0,1.0\n1,0,0.5\n2,0,0.1\n";
  }
  const std::string base = "version = 1\n[model]\nm = 2\nlambda_bar = 2\nintensity = table\n";
  const auto cfg = parse_config_string(base + "intensity_table = li.csv\n", dir);
  const auto li = build_intensity(cfg);
  EXPECT_DOUBLE_EQ(li(0.7, 0), 2.0);
  EXPECT_DOUBLE_EQ(li(0.7, 1), 0.5);
  try {
    parse_config_string(base + "intensity_table = bad.csv\n", dir);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "lambda(t, M) = 0"));
  }
}

TEST(Config, BuildersMapChoices) {
  auto cfg = parse_config_string(
      "version = 1\n[factor]\nkind = cir\ncir_scheme = exact\n[engine]\nalgorithm = naive\n"
      "forced_recompute = true\nx0 = 2\n[experiment]\nestimators = tau, pmf-point\npmf_level = 4\n");
  const auto dyn = build_dynamics(cfg.factor);
  ASSERT_TRUE(std::holds_alternative<CirDynamics>(dyn));
  EXPECT_EQ(std::get<CirDynamics>(dyn).scheme, CirScheme::exact);
  const auto opt = build_engine_options(cfg);
  EXPECT_EQ(opt.algorithm, Algorithm::naive);
  EXPECT_EQ(opt.aggregate_mode, AggregateMode::forced_recompute);
  EXPECT_EQ(opt.initial.x0, 2);
  const auto est = build_estimators(cfg);
  ASSERT_EQ(est.size(), 2u);
  EXPECT_EQ(est[0].kind, EstimatorKind::tau);
  EXPECT_EQ(est[1].level, 4);
  EXPECT_EQ(tau_thresholds(cfg), (std::vector<double>{0.25, 0.125}));
}

TEST(Config, GenericFactorIsLinear) {
  const auto cfg = parse_config_string(
      "version = 1\n[factor]\nkind = generic\ndrift_const = 1\ndrift_linear = -2\njump_linear = "
      "-0.5\n");
  const auto dyn = std::get<GenericDynamics>(build_dynamics(cfg.factor));
  EXPECT_DOUBLE_EQ(dyn.drift(0.0, 0, 3.0), -5.0);
  EXPECT_DOUBLE_EQ(dyn.jump(0.0, 0, 4.0), -2.0);
  EXPECT_DOUBLE_EQ(dyn.vol(0.0, 0, 4.0), 0.0);
}

}  // namespace
}  // namespace sli
