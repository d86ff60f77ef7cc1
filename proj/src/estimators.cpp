#include "sli/estimators.hpp"

#include "sli/model.hpp"

#include <algorithm>
#include <cmath>

namespace sli {

PmfEstimate marginal_pmf(std::span<const PathRecord> paths, int m) {
  if (paths.empty()) throw DomainError("marginal_pmf: empty path set");
  PmfEstimate est;
  est.n_samples = paths.size();
  est.probs.assign(static_cast<std::size_t>(m) + 1, 0.0);
  for (const auto& p : paths) {
    if (p.x_terminal < 0 || p.x_terminal > m) throw DomainError("marginal_pmf: level outside {0..M}");
    est.probs[static_cast<std::size_t>(p.x_terminal)] += 1.0;
  }
  const auto n = static_cast<double>(paths.size());
  est.std_error.resize(est.probs.size());
  for (std::size_t k = 0; k < est.probs.size(); ++k) {
    est.probs[k] /= n;
    est.std_error[k] = std::sqrt(est.probs[k] * (1.0 - est.probs[k]) / n);
  }
  return est;
}

double asian_payoff(const PathRecord& path, double strike, double horizon) {
  double sum = 0.0;
  for (double t : path.jump_times) sum += t;
  const double average = static_cast<double>(path.x_terminal) - sum / horizon;
  return std::max(0.0, average - strike);
}

double longest_gap(const PathRecord& path, double horizon, GapConvention convention) {
  const auto& jumps = path.jump_times;
  if (jumps.empty()) return horizon;
  double best = convention == GapConvention::skip_first ? 0.0 : jumps.front();
  for (std::size_t k = 1; k < jumps.size(); ++k) best = std::max(best, jumps[k] - jumps[k - 1]);
  if (convention != GapConvention::skip_last) best = std::max(best, horizon - jumps.back());
  return best;
}

std::vector<ScalarEstimate> tau_cdf(std::span<const PathRecord> paths,
                                    std::span<const double> thresholds, double horizon,
                                    GapConvention convention) {
  if (paths.empty()) throw DomainError("tau_cdf: empty path set");
  std::vector<double> taus;
  taus.reserve(paths.size());
  for (const auto& p : paths) taus.push_back(longest_gap(p, horizon, convention));
  std::sort(taus.begin(), taus.end());
  const auto n = static_cast<double>(taus.size());
  std::vector<ScalarEstimate> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    const auto hits = std::upper_bound(taus.begin(), taus.end(), th) - taus.begin();
    const double p = static_cast<double>(hits) / n;
    out.push_back({p, std::sqrt(p * (1.0 - p) / n), taus.size()});
  }
  return out;
}

ScalarEstimate sample_mean(std::span<const double> values) {
  ScalarEstimate e;
  e.n_samples = values.size();
  if (values.empty()) return e;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  e.value = mean;
  if (values.size() > 1) {
    e.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) /
                            static_cast<double>(values.size()));
  }
  return e;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  const std::size_t n = std::max(p.size(), q.size());
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = k < p.size() ? p[k] : 0.0;
    const double b = k < q.size() ? q[k] : 0.0;
    s += std::abs(a - b);
  }
  return 0.5 * s;
}

}  // namespace sli
