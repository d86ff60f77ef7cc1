#include "sli/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sli {
namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("sli_io_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-300, 123456789.123456789, -0.0}) {
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Io, PathsCsv) {
  const auto d = temp_dir("paths");
  PathRecord a;
  a.jump_times = {0.25, 0.5};
  PathRecord b;
  std::vector<std::vector<PathRecord>> reps{{a, b}, {b, a}};
  io::write_paths_csv(d / "p.csv", reps);
  EXPECT_EQ(slurp(d / "p.csv"),
            "replication,particle,jump_time\n0,0,0.25\n0,0,0.5\n1,1,0.25\n1,1,0.5\n");
}

TEST(Io, PmfAndCdfCsv) {
  const auto d = temp_dir("pmf");
  PmfEstimate pmf{{0.75, 0.25}, {0.1, 0.1}, 4};
  io::write_pmf_csv(d / "pmf.csv", pmf);
  EXPECT_EQ(slurp(d / "pmf.csv"),
            "bin,value,stderr\n0,0.75,0.10000000000000001\n1,0.25,0.10000000000000001\n");
  const std::vector<double> th{0.5};
  const std::vector<ScalarEstimate> v{{0.5, 0.25, 4}};
  io::write_cdf_csv(d / "cdf.csv", th, v);
  EXPECT_EQ(slurp(d / "cdf.csv"), "bin,value,stderr\n0.5,0.5,0.25\n");
}

TEST(Io, FpAndConvergenceCsv) {
  const auto d = temp_dir("fp");
  const auto s = FpState::dirac(1, 1, 0, 0);
  io::write_fp_csv(d / "fp.csv", std::vector<FpState>{s});
  EXPECT_EQ(slurp(d / "fp.csv"), "t,i,j,P\n0,0,0,1\n0,1,0,0\n");
  io::write_convergence_csv(d / "c.csv", std::vector<StudyRow>{{100, 0.5, 200}});
  EXPECT_EQ(slurp(d / "c.csv"), "N,mse,n_reps\n100,0.5,200\n");
}

TEST(Io, HistogramRoundTrip) {
  const auto d = temp_dir("hist");
  std::vector<PathRecord> paths(5);
  paths[1].x_terminal = 2;
  paths[3].x_terminal = 2;
  const auto h = io::histogram_of(paths, 3);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{3, 0, 2, 0}));
  io::write_histogram(d / "h.bin", h);
  const auto bytes = slurp(d / "h.bin");
  ASSERT_EQ(bytes.size(), 4u + 12u + 8u + 4u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "SLIH");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
  EXPECT_EQ(io::read_histogram(d / "h.bin"), h);
}

TEST(Io, HistogramRejectsGarbage) {
  const auto d = temp_dir("garbage");
  {
    std::ofstream out(d / "x.bin");
    out << "NOPE";
  }
  EXPECT_THROW(io::read_histogram(d / "x.bin"), std::runtime_error);
  EXPECT_THROW(io::read_histogram(d / "missing.bin"), std::runtime_error);
}

}  // namespace
}  // namespace sli
