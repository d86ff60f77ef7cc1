#include "sli/convergence.hpp"

#include "sli/estimators.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

namespace sli {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::pmf_point:
      return "pmf-point";
    case EstimatorKind::asian:
      return "asian";
    case EstimatorKind::tau:
      return "tau";
  }
  return "unknown";
}

double evaluate_estimator(const EstimatorSpec& spec, std::span<const PathRecord> paths,
                          double horizon) {
  if (paths.empty()) throw DomainError("evaluate_estimator: empty path set");
  double acc = 0.0;
  for (const auto& p : paths) {
    switch (spec.kind) {
      case EstimatorKind::pmf_point:
        acc += p.x_terminal == spec.level ? 1.0 : 0.0;
        break;
      case EstimatorKind::asian:
        acc += asian_payoff(p, spec.strike, horizon);
        break;
      case EstimatorKind::tau:
        acc += longest_gap(p, horizon);
        break;
    }
  }
  return acc / static_cast<double>(paths.size());
}

std::vector<std::vector<double>> simulate_estimates(const SystemSetup& setup, std::size_t n,
                                                    std::size_t reps,
                                                    std::span<const EstimatorSpec> specs,
                                                    std::uint64_t seed, int threads) {
  EngineOptions opt = setup.options;
  opt.n = n;
  opt.parallel_advance = false;
  std::vector<std::vector<double>> out(reps, std::vector<double>(specs.size(), 0.0));
  const auto nreps = static_cast<std::ptrdiff_t>(reps);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  const double horizon = setup.model.params.horizon;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (std::ptrdiff_t r = 0; r < nreps; ++r) {
    try {
      const auto s = derive_seed(seed, static_cast<std::uint64_t>(r), StreamRole::replication);
      const RunResult res = run_system(setup.model, setup.dynamics, opt, s);
      for (std::size_t e = 0; e < specs.size(); ++e) {
        out[static_cast<std::size_t>(r)][e] = evaluate_estimator(specs[e], res.paths, horizon);
      }
    } catch (...) {
#pragma omp critical(sli_estimate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Reference> build_reference(const SystemSetup& setup,
                                       std::span<const EstimatorSpec> specs, std::size_t n_large,
                                       std::size_t reps, std::uint64_t seed, int threads) {
  if (reps < 1) throw DomainError("build_reference: need at least one system");
  const auto est = simulate_estimates(setup, n_large, reps, specs, seed, threads);
  std::vector<Reference> out;
  for (std::size_t e = 0; e < specs.size(); ++e) {
    std::vector<double> col;
    col.reserve(reps);
    for (const auto& row : est) col.push_back(row[e]);
    const auto m = sample_mean(col);
    out.push_back(Reference{m.value, m.std_error, n_large, reps});
  }
  return out;
}

RegressionResult fit_convergence(std::span<const StudyRow> rows,
                                 std::vector<std::size_t>* excluded) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (!(r.mse > 0.0) || r.n == 0) {
      if (excluded) excluded->push_back(r.n);
      continue;
    }
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(-0.5 * std::log(r.mse));
  }
  RegressionResult res;
  res.points = xs.size();
  if (xs.size() < 2) throw DomainError("fit_convergence: need at least two usable points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_convergence: all N identical");
  res.alpha = sxy / sxx;
  res.beta = my - res.alpha * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (res.alpha * xs[i] + res.beta);
    ss += e * e;
  }
  res.resid_var = ss / n;
  return res;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

RankCorrelation spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw DomainError("spearman: need two samples of equal size >= 3");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  RankCorrelation rc;
  if (sxx == 0.0 || syy == 0.0) return rc;
  rc.rho = sxy / std::sqrt(sxx * syy);
  if (std::abs(rc.rho) >= 1.0) {
    rc.p_value = 0.0;
    return rc;
  }
  const double dof = n - 2.0;
  const double t = rc.rho * std::sqrt(dof / (1.0 - rc.rho * rc.rho));
  boost::math::students_t dist(dof);
  rc.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return rc;
}

std::vector<StudyResult> run_study(const ConvergenceStudy& study, const SystemSetup& setup,
                                   std::span<const Reference> references, std::uint64_t seed,
                                   int threads) {
  if (references.size() != study.estimators.size()) {
    throw DomainError("run_study: one reference per estimator required");
  }
  if (study.reps_per_n < 2) throw DomainError("run_study: reps_per_n must be >= 2");
  for (std::size_t k = 1; k < study.n_values.size(); ++k) {
    if (study.n_values[k] <= study.n_values[k - 1]) {
      throw DomainError("run_study: n_values must be strictly increasing");
    }
  }
  std::vector<StudyResult> out(study.estimators.size());
  for (std::size_t e = 0; e < out.size(); ++e) {
    out[e].estimator = study.estimators[e];
    out[e].reference = references[e];
  }
  for (std::size_t k = 0; k < study.n_values.size(); ++k) {
    const std::size_t n = study.n_values[k];
    const auto point_seed = derive_seed(seed, k, StreamRole::study_point);
    const auto est =
        simulate_estimates(setup, n, study.reps_per_n, study.estimators, point_seed, threads);
    for (std::size_t e = 0; e < out.size(); ++e) {
      double acc = 0.0;
      for (const auto& row : est) {
        const double d = row[e] - references[e].value;
        acc += d * d;
      }
      out[e].rows.push_back(StudyRow{n, acc / static_cast<double>(est.size()), est.size()});
    }
  }
  for (auto& r : out) {
    r.regression = fit_convergence(r.rows, &r.excluded_n);
    std::vector<double> ns, mses;
    for (const auto& row : r.rows) {
      ns.push_back(static_cast<double>(row.n));
      mses.push_back(row.mse);
    }
    if (ns.size() >= 3) r.mse_vs_n = spearman(ns, mses);
  }
  return out;
}

CltReport standardize(std::span<const double> sample) {
  CltReport rep;
  if (sample.empty()) {
    rep.degenerate = true;
    return rep;
  }
  const double n = static_cast<double>(sample.size());
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : sample) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  rep.mean = mean;
  rep.std_dev = std::sqrt(m2);
  if (!(m2 > 0.0)) {
    rep.degenerate = true;
    return rep;
  }
  rep.skewness = m3 / std::pow(m2, 1.5);
  rep.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  rep.standardized.reserve(sample.size());
  for (double v : sample) rep.standardized.push_back((v - mean) / rep.std_dev);
  return rep;
}

CltReport clt_histogram(const SystemSetup& setup, std::size_t n_particles, std::size_t n_systems,
                        const EstimatorSpec& spec, std::uint64_t seed, int threads) {
  if (n_systems < 100) throw DomainError("clt_histogram: need at least 100 systems");
  const EstimatorSpec specs[] = {spec};
  const auto est = simulate_estimates(setup, n_particles, n_systems, specs, seed, threads);
  std::vector<double> sample;
  sample.reserve(est.size());
  for (const auto& row : est) sample.push_back(row[0]);
  return standardize(sample);
}

}  // namespace sli
