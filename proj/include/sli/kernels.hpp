#pragma once

// Data-parallel inner loops of the particle engine. Each kernel has a serial
// reference and an OpenMP version; both consume the per-particle streams in
// the same way, so their outputs are bitwise identical.

#include "sli/factor.hpp"
#include "sli/model.hpp"
#include "sli/rng.hpp"

#include <cstdint>
#include <span>

namespace sli::kernels {

/// Moves every particle whose last discretization time is before `target`
/// up to `target`, holding its loss level fixed.
void advance_factors_serial(const FactorDynamics& dyn, const LocalIntensity& li,
                            std::span<const int> xs, std::span<double> ys,
                            std::span<double> t_last, std::span<Rng> brownian, double target,
                            double max_step);

void advance_factors_omp(const FactorDynamics& dyn, const LocalIntensity& li,
                         std::span<const int> xs, std::span<double> ys, std::span<double> t_last,
                         std::span<Rng> brownian, double target, double max_step);

/// count[j] = #{i : xs[i] = j}, fsum[j] = sum of f(ys[i]) over those i, summed
/// in increasing particle index. Serial only: a parallel reduction would
/// change the summation order and break bitwise reproducibility.
void recompute_aggregates(std::span<const int> xs, std::span<const double> ys, const ClampF& f,
                          std::span<std::int64_t> count, std::span<double> fsum);

/// Sum of f(ys[l]) and count over particles at `level`, in index order.
/// The naive algorithm's per-proposal conditional-expectation scan.
struct LevelSums {
  std::int64_t count = 0;
  double fsum = 0.0;
};
LevelSums scan_level(std::span<const int> xs, std::span<const double> ys, const ClampF& f,
                     int level);

}  // namespace sli::kernels
