#pragma once

#include "sli/factor.hpp"
#include "sli/model.hpp"
#include "sli/particle_system.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sli {

enum class EstimatorKind {
  pmf_point,  ///< fraction of particles with X_T = level
  asian,      ///< mean Asian payoff on the loss count
  tau,        ///< mean longest jump-free interval
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::asian;
  int level = 3;
  double strike = 1.0;

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

std::string to_string(EstimatorKind kind);

/// Particle-system estimate of the quantity named by spec from one system.
double evaluate_estimator(const EstimatorSpec& spec, std::span<const PathRecord> paths,
                          double horizon);

/// Everything needed to instantiate one particle system except N and the seed.
struct SystemSetup {
  Model model;
  FactorDynamics dynamics;
  EngineOptions options;
};

/// estimates[r][e]: estimator e on independent system r of n particles.
/// System r uses seed derive_seed(seed, r, Role::replication).
std::vector<std::vector<double>> simulate_estimates(const SystemSetup& setup, std::size_t n,
                                                    std::size_t reps,
                                                    std::span<const EstimatorSpec> specs,
                                                    std::uint64_t seed, int threads = 0);

struct Reference {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_large = 0;
  std::size_t reps = 0;
};

/// Pooled mean over `reps` independent systems of n_large particles.
std::vector<Reference> build_reference(const SystemSetup& setup,
                                       std::span<const EstimatorSpec> specs, std::size_t n_large,
                                       std::size_t reps, std::uint64_t seed, int threads = 0);

struct ConvergenceStudy {
  std::vector<std::size_t> n_values;
  std::size_t reps_per_n = 200;
  std::vector<EstimatorSpec> estimators;
};

struct StudyRow {
  std::size_t n = 0;
  double mse = 0.0;
  std::size_t reps = 0;
};

/// -1/2 log(mse) = alpha log(N) + beta + eps_N, fitted by least squares.
struct RegressionResult {
  double alpha = 0.0;
  double beta = 0.0;
  double resid_var = 0.0;
  std::size_t points = 0;
};

/// Rows with mse <= 0 are skipped and their N appended to `excluded`.
RegressionResult fit_convergence(std::span<const StudyRow> rows,
                                 std::vector<std::size_t>* excluded = nullptr);

struct RankCorrelation {
  double rho = 0.0;
  double p_value = 1.0;  ///< two-sided, Student-t approximation
};

RankCorrelation spearman(std::span<const double> x, std::span<const double> y);

struct StudyResult {
  EstimatorSpec estimator;
  Reference reference;
  std::vector<StudyRow> rows;
  RegressionResult regression;
  RankCorrelation mse_vs_n;
  std::vector<std::size_t> excluded_n;
};

/// For each N: mse = mean over replications of (estimate - reference)^2.
/// All estimators in the study share the simulated systems.
std::vector<StudyResult> run_study(const ConvergenceStudy& study, const SystemSetup& setup,
                                   std::span<const Reference> references, std::uint64_t seed,
                                   int threads = 0);

struct CltReport {
  std::vector<double> standardized;
  double mean = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool degenerate = false;
};

/// (x - mean) / sd with population moments; degenerate when sd = 0.
CltReport standardize(std::span<const double> sample);

/// Standardized estimator values over n_systems independent systems.
CltReport clt_histogram(const SystemSetup& setup, std::size_t n_particles, std::size_t n_systems,
                        const EstimatorSpec& spec, std::uint64_t seed, int threads = 0);

}  // namespace sli
