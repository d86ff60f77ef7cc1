#pragma once

// Experiment configuration: an INI-style key/value file.
//
//   version = 1
//   [model]       m, lambda_bar, f_low, f_high, horizon, intensity, intensity_table
//   [factor]      kind, y0, a, sigma, gamma, kappa, cir_scheme, ou_drift,
//                 drift_const, drift_linear, vol_const, vol_linear, jump_linear
//   [engine]      n, d, algorithm, seed, forced_recompute, x0, x_pmf, replications
//   [experiment]  model, strike, tau_thresholds, tau_convention, n_values, reps_per_n, reference_n,
//                 reference_reps, estimators, pmf_level, clt_systems, clt_particles,
//                 bench_n, bench_repeats
//   [discrete]    generator_file, f_values, y0, dt, output_every, ctmc_paths
//
// Lists are comma separated; n_values and bench_n also accept start:stop:step.
// Relative file paths resolve against the directory holding the config file.

#include "sli/convergence.hpp"
#include "sli/estimators.hpp"
#include "sli/factor.hpp"
#include "sli/model.hpp"
#include "sli/particle_system.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct IntensitySpec {
  std::string kind = "linear-decay";  ///< linear-decay | table | zero
  std::string table_path;             ///< CSV: level,start,value

  friend bool operator==(const IntensitySpec&, const IntensitySpec&) = default;
};

struct FactorSpec {
  std::string kind = "lognormal";  ///< lognormal | cir | generic
  double y0 = 1.0;
  double a = 1.0;
  double sigma = 0.3;
  double gamma = 1.0;
  double kappa = 1.0;
  std::string cir_scheme = "second-order";  ///< second-order | exact
  std::string ou_drift = "ito";             ///< ito | plus-half
  // generic: b = drift_const + drift_linear y, s = vol_const + vol_linear y,
  // jump = jump_linear y
  double drift_const = 0.0;
  double drift_linear = 0.0;
  double vol_const = 0.0;
  double vol_linear = 0.0;
  double jump_linear = 0.0;

  friend bool operator==(const FactorSpec&, const FactorSpec&) = default;
};

struct EngineSpec {
  std::size_t n = 50000;
  std::size_t d = 100;
  std::string algorithm = "improved";  ///< improved | naive
  std::uint64_t seed = 20240101;
  bool forced_recompute = false;
  int x0 = 0;
  std::vector<double> x_pmf;
  std::size_t replications = 1;

  friend bool operator==(const EngineSpec&, const EngineSpec&) = default;
};

struct ExperimentSpec {
  std::string model = "sli";  ///< sli | li
  double strike = 1.0;
  std::vector<double> tau_thresholds;  ///< empty: {T/4, T/8}
  std::string tau_convention = "closed";  ///< closed | skip-first | skip-last
  std::vector<std::size_t> n_values;
  std::size_t reps_per_n = 200;
  std::size_t reference_n = 10000;
  std::size_t reference_reps = 100;
  std::vector<std::string> estimators{"asian", "tau"};
  int pmf_level = 3;
  std::size_t clt_systems = 0;
  std::size_t clt_particles = 1000;
  std::vector<std::size_t> bench_n{20000};
  std::size_t bench_repeats = 1;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct DiscreteSpec {
  std::string generator_file;
  std::vector<double> f_values;
  int y0 = 0;
  double dt = 1e-3;
  std::size_t output_every = 10;
  std::size_t ctmc_paths = 0;

  friend bool operator==(const DiscreteSpec&, const DiscreteSpec&) = default;
};

struct ExperimentConfig {
  int version = 1;
  ModelParams model;
  IntensitySpec intensity;
  FactorSpec factor;
  EngineSpec engine;
  ExperimentSpec experiment;
  DiscreteSpec discrete;
  /// Directory used to resolve relative paths (not serialized).
  std::filesystem::path base_dir;
  /// Keys that were missing and filled from defaults (not serialized).
  std::vector<std::string> applied_defaults;

  bool operator==(const ExperimentConfig& o) const {
    return version == o.version && model == o.model && intensity == o.intensity &&
           factor == o.factor && engine == o.engine && experiment == o.experiment &&
           discrete == o.discrete;
  }
};

inline constexpr int kConfigVersion = 1;

ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_string(const std::string& text,
                                     const std::filesystem::path& base_dir = {});
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

LocalIntensity build_intensity(const ExperimentConfig& cfg);
Model build_model(const ExperimentConfig& cfg);
FactorDynamics build_dynamics(const FactorSpec& spec);
EngineOptions build_engine_options(const ExperimentConfig& cfg);
SystemSetup build_setup(const ExperimentConfig& cfg);
std::vector<EstimatorSpec> build_estimators(const ExperimentConfig& cfg);
std::vector<double> tau_thresholds(const ExperimentConfig& cfg);
GapConvention gap_convention(const ExperimentConfig& cfg);

/// Intensity table CSV with header "level,start,value".
LocalIntensity load_intensity_table(const std::filesystem::path& path, int m, double horizon);

}  // namespace sli
