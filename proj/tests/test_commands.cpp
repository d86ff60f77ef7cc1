#include "sli/commands.hpp"
#include "sli/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace sli {
namespace {

namespace fs = std::filesystem;

fs::path fresh(const std::string& name) {
  auto d = fs::temp_directory_path() / ("sli_cmd_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmall = R"(version = 1
[model]
f_low = 1/3
f_high = 3
[factor]
kind = cir
[engine]
n = 300
d = 20
seed = 99
replications = 2
[experiment]
n_values = 20, 40, 80
reps_per_n = 4
reference_n = 100
reference_reps = 4
bench_n = 100, 200
)";

TEST(Dispatch, SimulateIsByteIdentical) {
  const auto cfg = parse_config_string(kSmall);
  const auto a = fresh("sim_a"), b = fresh("sim_b");
  const auto ra = dispatch("simulate", cfg, a, 1);
  dispatch("simulate", cfg, b, 1);
  for (const char* f : {"paths.csv", "terminal_histogram.bin", "config.ini"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_FALSE(slurp(a / "paths.csv").empty());
  const auto h = io::read_histogram(a / "terminal_histogram.bin");
  EXPECT_EQ(h.n, 600u);
  EXPECT_EQ(ra.meta["config_hash"], config_hash(cfg));
  EXPECT_TRUE(fs::exists(a / "meta.json"));
  EXPECT_NE(ra.summary.find("simulate"), std::string::npos);
}

TEST(Dispatch, SeedChangesPayload) {
  auto cfg = parse_config_string(kSmall);
  const auto a = fresh("seed_a"), b = fresh("seed_b");
  dispatch("simulate", cfg, a);
  cfg.engine.seed = 100;
  dispatch("simulate", cfg, b);
  EXPECT_NE(slurp(a / "paths.csv"), slurp(b / "paths.csv"));
}

TEST(Dispatch, MarginalsReportsTvForLocalIntensity) {
  auto cfg = parse_config_string(std::string(kSmall) + "model = li\n");
  cfg.engine.n = 5000;
  const auto out = fresh("marg");
  const auto r = dispatch("marginals", cfg, out);
  EXPECT_NE(r.summary.find("TV distance"), std::string::npos);
  EXPECT_LT(r.meta["payload"]["tv_to_binomial"].get<double>(), 0.05);
  EXPECT_TRUE(fs::exists(out / "oracle.csv"));
}

TEST(Dispatch, AsianTauConvergenceBench) {
  const auto cfg = parse_config_string(kSmall);
  auto r = dispatch("asian", cfg, fresh("asian"));
  EXPECT_NE(r.summary.find("price"), std::string::npos);
  r = dispatch("tau-cdf", cfg, fresh("tau"));
  EXPECT_NE(r.summary.find("P(tau <= 0.2500)"), std::string::npos);
  const auto conv = fresh("conv");
  r = dispatch("convergence", cfg, conv);
  EXPECT_TRUE(fs::exists(conv / "convergence_asian.csv"));
  EXPECT_TRUE(fs::exists(conv / "regression.json"));
  r = dispatch("bench", cfg, fresh("bench"));
  EXPECT_TRUE(r.meta["payload"].contains("naive_exponent"));
}

TEST(Dispatch, FokkerPlanck) {
  const auto dir = fresh("fp_cfg");
  fs::create_directories(dir);
  {
    std::ofstream g(dir / "gen.json");
    g << R"({"m": 2, "j": 2, "generators": [[[-1,1],[2,-2]], [[-0.5,0.5],[1,-1]], [[-2,2],[0.5,-0.5]]]})";
  }
  const auto cfg = parse_config_string(
      "version = 1\n[model]\nm = 2\nlambda_bar = 1.5\nf_low = 0.5\nf_high = 2\n"
      "[discrete]\ngenerator_file = gen.json\nf_values = 0.5, 2\nctmc_paths = 2000\n",
      dir);
  const auto out = fresh("fp_out");
  const auto r = dispatch("fokker-planck", cfg, out);
  EXPECT_TRUE(fs::exists(out / "fp.csv"));
  EXPECT_TRUE(fs::exists(out / "ctmc_vs_fp.csv"));
  EXPECT_LE(r.meta["payload"]["max_mass_error"].get<double>(), 1e-8);
}

TEST(Dispatch, UnknownCommand) {
  const auto cfg = parse_config_string(kSmall);
  EXPECT_THROW(dispatch("plot", cfg, fresh("plot")), std::invalid_argument);
}

TEST(PowerLaw, RecoversExponent) {
  const std::vector<double> x{1000, 2000, 4000, 8000};
  std::vector<double> y;
  for (double v : x) y.push_back(3e-9 * v * v);
  EXPECT_NEAR(fit_power_law(x, y).exponent, 2.0, 1e-12);
}

}  // namespace
}  // namespace sli
