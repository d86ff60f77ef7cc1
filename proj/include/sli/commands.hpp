#pragma once

#include "sli/config.hpp"
#include "sli/convergence.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sli {

/// simulate, marginals, asian, tau-cdf, convergence, fokker-planck, bench
const std::vector<std::string>& command_names();

struct CommandResult {
  std::string summary;   ///< one line, printed by the CLI
  nlohmann::json meta;   ///< also written to <out>/meta.json
  std::vector<std::string> artifacts;
};

/// Runs `command` on a validated config and writes its artifacts under `out`.
/// threads = 0 uses the OpenMP default.
CommandResult dispatch(const std::string& command, const ExperimentConfig& cfg,
                       const std::filesystem::path& out, int threads = 0);

/// Version string baked in at build time (git describe).
const char* version_string();

struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
};

/// Least-squares fit of log(y) = exponent log(x) + log_prefactor.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// Wall-clock seconds of one particle system run, minimum over `repeats`.
double time_system(const SystemSetup& setup, std::size_t n, Algorithm algorithm,
                   std::uint64_t seed, std::size_t repeats = 1);

struct BenchRow {
  std::size_t n = 0;
  double naive_seconds = 0.0;
  double improved_seconds = 0.0;
};

}  // namespace sli
