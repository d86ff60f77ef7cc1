#include "sli/kernels.hpp"

#include <algorithm>
#include <exception>

namespace sli::kernels {

void advance_factors_serial(const FactorDynamics& dyn, const LocalIntensity& li,
                            std::span<const int> xs, std::span<double> ys,
                            std::span<double> t_last, std::span<Rng> brownian, double target,
                            double max_step) {
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (t_last[i] >= target) continue;
    const FactorState s =
        advance_factor(dyn, li, FactorState{ys[i], t_last[i]}, xs[i], target, max_step, brownian[i]);
    ys[i] = s.y;
    t_last[i] = target;
  }
}

void advance_factors_omp(const FactorDynamics& dyn, const LocalIntensity& li,
                         std::span<const int> xs, std::span<double> ys, std::span<double> t_last,
                         std::span<Rng> brownian, double target, double max_step) {
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (t_last[i] >= target) continue;
    try {
      const FactorState s = advance_factor(dyn, li, FactorState{ys[i], t_last[i]}, xs[i], target,
                                           max_step, brownian[i]);
      ys[i] = s.y;
      t_last[i] = target;
    } catch (...) {
#pragma omp critical(sli_advance_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void recompute_aggregates(std::span<const int> xs, std::span<const double> ys, const ClampF& f,
                          std::span<std::int64_t> count, std::span<double> fsum) {
  std::fill(count.begin(), count.end(), 0);
  std::fill(fsum.begin(), fsum.end(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto j = static_cast<std::size_t>(xs[i]);
    count[j] += 1;
    fsum[j] += f(ys[i]);
  }
}

LevelSums scan_level(std::span<const int> xs, std::span<const double> ys, const ClampF& f,
                     int level) {
  LevelSums s;
  for (std::size_t l = 0; l < xs.size(); ++l) {
    if (xs[l] != level) continue;
    s.count += 1;
    s.fsum += f(ys[l]);
  }
  return s;
}

}  // namespace sli::kernels
