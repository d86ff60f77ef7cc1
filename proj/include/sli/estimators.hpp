#pragma once

#include "sli/particle_system.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sli {

struct PmfEstimate {
  std::vector<double> probs;
  std::vector<double> std_error;  ///< sqrt(p (1 - p) / n) per level
  std::size_t n_samples = 0;
};

struct ScalarEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Empirical pmf of x_terminal over {0..m}.
PmfEstimate marginal_pmf(std::span<const PathRecord> paths, int m);

/// ((1/T) int_0^T X_u du - K)_+ from the jump times:
/// (1/T) int X = X_T - (1/T) sum of jump times.
double asian_payoff(const PathRecord& path, double strike, double horizon);

/// Which boundary intervals enter the longest-gap statistic.
enum class GapConvention {
  closed,     ///< [0, t_1), ..., [t_n, T]: the default
  skip_first, ///< drops [0, t_1) when there is at least one jump
  skip_last,  ///< drops [t_n, T] when there is at least one jump
};

/// Longest of the intervals delimited by {0}, the jump times and {T}.
double longest_gap(const PathRecord& path, double horizon,
                   GapConvention convention = GapConvention::closed);

/// P(tau <= threshold) for each threshold, with binomial standard errors.
std::vector<ScalarEstimate> tau_cdf(std::span<const PathRecord> paths,
                                    std::span<const double> thresholds, double horizon,
                                    GapConvention convention = GapConvention::closed);

/// Sample mean and its standard error.
ScalarEstimate sample_mean(std::span<const double> values);

double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace sli
