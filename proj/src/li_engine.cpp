#include "sli/li_engine.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <omp.h>

#include <cmath>
#include <exception>

namespace sli {

LiPath simulate_li_path(const Model& model, int x0, Rng& rng) {
  const ModelParams& p = model.params;
  if (x0 < 0 || x0 > p.m) throw DomainError("simulate_li_path: x0 outside {0..M}");
  LiPath path;
  path.x_initial = x0;
  int x = x0;
  double t = 0.0;
  while (x < p.m) {
    t += exponential(rng, p.lambda_bar);
    if (t > p.horizon) break;
    const double accept = model.intensity.left_limit(t, x) / p.lambda_bar;
    if (uniform01(rng) < accept) {
      path.jump_times.push_back(t);
      ++x;
    }
  }
  path.x_terminal = x;
  return path;
}

std::vector<LiPath> simulate_li_paths(const Model& model, std::size_t n_paths, int x0,
                                      std::uint64_t seed, int threads) {
  require_valid(model.params, model.intensity);
  std::vector<LiPath> out(n_paths);
  const auto n = static_cast<std::ptrdiff_t>(n_paths);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(i), StreamRole::path);
      out[static_cast<std::size_t>(i)] = simulate_li_path(model, x0, rng);
    } catch (...) {
#pragma omp critical(sli_li_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double binomial_oracle(const LocalIntensity& li, double t, int k) {
  if (!li.is_linear_decay()) {
    throw DomainError("binomial oracle is only available for the linear-decay intensity");
  }
  if (k < 0 || k > li.m()) throw DomainError("binomial oracle: k outside {0..M}");
  if (t < 0.0) throw DomainError("binomial oracle: negative time");
  const double p = -std::expm1(-li.decay_scale() * t / li.m());
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  boost::math::binomial_distribution<double> law(li.m(), p);
  return boost::math::pdf(law, k);
}

std::vector<double> binomial_oracle_pmf(const LocalIntensity& li, double t) {
  std::vector<double> pmf(static_cast<std::size_t>(li.m()) + 1);
  for (int k = 0; k <= li.m(); ++k) pmf[static_cast<std::size_t>(k)] = binomial_oracle(li, t, k);
  return pmf;
}

}  // namespace sli
