#include "sli/particle_system.hpp"

#include "sli/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace sli {

void AggregateTable::recompute(std::span<const int> xs, std::span<const double> ys,
                               const ClampF& f) {
  kernels::recompute_aggregates(xs, ys, f, count, fsum);
}

ParticleSystem::ParticleSystem(Model model, FactorDynamics dynamics, EngineOptions options,
                               std::uint64_t seed)
    : model_(std::move(model)),
      dyn_(std::move(dynamics)),
      opt_(std::move(options)),
      horizon_(model_.params.horizon),
      h_(0.0),
      inv_bound_(0.0),
      system_rate_(0.0),
      system_(make_stream(seed, 0, StreamRole::proposals)) {
  require_valid(model_.params, model_.intensity);
  if (opt_.n < 1) throw std::invalid_argument("particle count n must be >= 1");
  if (opt_.d < 1) throw std::invalid_argument("grid size d must be >= 1");
  const int m = model_.params.m;
  if (opt_.initial.x_pmf.empty()) {
    if (opt_.initial.x0 < 0 || opt_.initial.x0 > m) {
      throw DomainError("initial loss level outside {0..M}");
    }
  } else if (opt_.initial.x_pmf.size() != static_cast<std::size_t>(m) + 1) {
    throw DomainError("initial pmf must have M + 1 entries");
  }
  const double y0 = initial_factor(dyn_);
  if (preserves_positivity(dyn_) && !(y0 > 0.0)) throw DomainError("initial factor must be > 0");

  h_ = horizon_ / static_cast<double>(opt_.d);
  inv_bound_ = 1.0 / model_.proposal_rate();
  system_rate_ = model_.proposal_rate() * static_cast<double>(opt_.n);

  const std::size_t n = opt_.n;
  xs_.assign(n, opt_.initial.x0);
  ys_.assign(n, y0);
  t_last_.assign(n, 0.0);
  brownian_.reserve(n);
  jump_decision_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    brownian_.push_back(make_stream(seed, i, StreamRole::brownian));
    jump_decision_.push_back(make_stream(seed, i, StreamRole::jump_decision));
  }

  if (!opt_.initial.x_pmf.empty()) {
    double total = 0.0;
    for (double p : opt_.initial.x_pmf) {
      if (p < 0.0) throw DomainError("initial pmf has a negative entry");
      total += p;
    }
    if (!(total > 0.0)) throw DomainError("initial pmf has zero mass");
    Rng init = make_stream(seed, 0, StreamRole::initial_law);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = uniform01(init) * total;
      double acc = 0.0;
      int level = m;
      for (int j = 0; j <= m; ++j) {
        acc += opt_.initial.x_pmf[static_cast<std::size_t>(j)];
        if (u < acc) {
          level = j;
          break;
        }
      }
      xs_[i] = level;
    }
  }

  paths_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    paths_[i].x_initial = xs_[i];
    if (opt_.record_y_grid) {
      paths_[i].y_grid.reserve(opt_.d + 1);
      paths_[i].y_grid.push_back(ys_[i]);
    }
  }

  agg_.count.assign(static_cast<std::size_t>(m) + 1, 0);
  agg_.fsum.assign(static_cast<std::size_t>(m) + 1, 0.0);
  if (opt_.algorithm == Algorithm::improved) agg_.recompute(xs_, ys_, model_.f);
}

double ParticleSystem::grid_date(std::size_t k) const noexcept {
  if (k >= opt_.d) return horizon_;
  return horizon_ * static_cast<double>(k) / static_cast<double>(opt_.d);
}

ParticleSystem::Proposal ParticleSystem::propose_next_event() {
  Proposal p;
  p.time = t_ + exponential(system_, system_rate_);
  p.particle = static_cast<std::size_t>(uniform_index(system_, opt_.n));
  ++stats_.proposals;
  return p;
}

void ParticleSystem::advance_particles(double target) {
  if (opt_.parallel_advance) {
    kernels::advance_factors_omp(dyn_, model_.intensity, xs_, ys_, t_last_, brownian_, target, h_);
  } else {
    kernels::advance_factors_serial(dyn_, model_.intensity, xs_, ys_, t_last_, brownian_, target,
                                    h_);
  }
}

void ParticleSystem::advance_to_grid(std::size_t k) {
  if (k <= k_ || k > opt_.d) throw std::logic_error("advance_to_grid: grid index out of order");
  const double target = grid_date(k);
  const bool improved = opt_.algorithm == Algorithm::improved;
  // Incremental sums are checked against the factors they were built from,
  // i.e. before this advance moves every Y.
  if (improved && opt_.check_invariants) check_aggregates_against_definition(false);
  advance_particles(target);
  t_ = target;
  k_ = k;
  if (opt_.record_y_grid) {
    for (std::size_t i = 0; i < xs_.size(); ++i) paths_[i].y_grid.push_back(ys_[i]);
  }
  if (improved) {
    agg_.recompute(xs_, ys_, model_.f);
    ++stats_.recomputes;
    if (opt_.check_invariants) check_aggregates_against_definition(true);
  }
}

void ParticleSystem::record_ratio(double r) {
  ++stats_.ratio_evaluations;
  stats_.min_ratio = std::min(stats_.min_ratio, r);
  stats_.max_ratio = std::max(stats_.max_ratio, r);
  if (opt_.check_invariants && !(r >= 0.0 && r <= 1.0)) ++stats_.ratio_violations;
}

double ParticleSystem::acceptance_ratio(double t_prop, std::size_t i) const {
  const int x = xs_[i];
  const double lambda = model_.intensity.left_limit(std::min(t_prop, horizon_), x);
  if (lambda == 0.0) return 0.0;
  const double fy = model_.f(ys_[i]);
  std::int64_t count = 0;
  double fsum = 0.0;
  if (opt_.algorithm == Algorithm::naive) {
    const auto s = kernels::scan_level(xs_, ys_, model_.f, x);
    count = s.count;
    fsum = s.fsum;
  } else {
    count = agg_.count[static_cast<std::size_t>(x)];
    fsum = agg_.fsum[static_cast<std::size_t>(x)];
  }
  if (count < 1 || !(fsum > 0.0)) {
    throw std::logic_error("acceptance_ratio: empty or non-positive aggregate at occupied level");
  }
  return thinning_ratio(inv_bound_, lambda, fy, count, fsum);
}

void ParticleSystem::apply_jump_event(double t_prop, std::size_t i) {
  const int x_old = xs_[i];
  if (x_old >= model_.params.m) {
    throw std::logic_error("apply_jump_event: particle already at the maximal loss level");
  }
  const bool incremental = opt_.algorithm == Algorithm::improved &&
                           opt_.aggregate_mode == AggregateMode::incremental;
  const auto jo = static_cast<std::size_t>(x_old);
  if (incremental) {
    agg_.count[jo] -= 1;
    agg_.fsum[jo] -= model_.f(ys_[i]);
    if (agg_.count[jo] == 0) agg_.fsum[jo] = 0.0;
  }

  FactorState s{ys_[i], t_last_[i]};
  s = advance_factor(dyn_, model_.intensity, s, x_old, t_prop, h_, brownian_[i]);
  s = apply_jump(dyn_, s, t_prop, x_old);
  ys_[i] = s.y;
  t_last_[i] = t_prop;
  xs_[i] = x_old + 1;

  if (incremental) {
    agg_.count[jo + 1] += 1;
    agg_.fsum[jo + 1] += model_.f(ys_[i]);
  } else if (opt_.algorithm == Algorithm::improved) {
    agg_.recompute(xs_, ys_, model_.f);
    ++stats_.recomputes;
  }
  paths_[i].jump_times.push_back(t_prop);
  ++stats_.accepted;

  if (opt_.check_invariants && opt_.algorithm == Algorithm::improved) {
    std::int64_t total = 0;
    for (auto c : agg_.count) total += c;
    if (total != static_cast<std::int64_t>(xs_.size())) ++stats_.conservation_violations;
    if (opt_.aggregate_mode == AggregateMode::forced_recompute) {
      check_aggregates_against_definition(true);
    }
  }
}

void ParticleSystem::check_aggregates_against_definition(bool exact) {
  // Independent per-level recount in particle order. Right after a recompute
  // the sums must agree bitwise; incremental sums get a relative tolerance.
  std::vector<std::int64_t> count(agg_.count.size(), 0);
  std::vector<double> fsum(agg_.fsum.size(), 0.0);
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const auto j = static_cast<std::size_t>(xs_[i]);
    ++count[j];
    fsum[j] += model_.f(ys_[i]);
  }
  std::int64_t total = 0;
  for (std::size_t j = 0; j < count.size(); ++j) {
    total += agg_.count[j];
    if (count[j] != agg_.count[j]) ++stats_.definitional_violations;
    const double drift = std::abs(fsum[j] - agg_.fsum[j]);
    stats_.max_fsum_drift = std::max(stats_.max_fsum_drift, drift);
    if (exact ? drift != 0.0 : drift > 1e-9 * std::max(1.0, fsum[j])) {
      ++stats_.definitional_violations;
    }
    if (agg_.fsum[j] < model_.params.f_low * static_cast<double>(agg_.count[j]) * (1.0 - 1e-12) ||
        agg_.fsum[j] > model_.params.f_high * static_cast<double>(agg_.count[j]) * (1.0 + 1e-12)) {
      ++stats_.definitional_violations;
    }
  }
  if (total != static_cast<std::int64_t>(xs_.size())) ++stats_.conservation_violations;
}

void ParticleSystem::run() {
  if (finished_) return;
  while (true) {
    const Proposal p = propose_next_event();
    while (k_ < opt_.d && p.time > grid_date(k_ + 1)) advance_to_grid(k_ + 1);
    if (p.time > horizon_) break;
    const double r = acceptance_ratio(p.time, p.particle);
    record_ratio(r);
    const double u = uniform01(jump_decision_[p.particle]);
    if (u < r) apply_jump_event(p.time, p.particle);
    t_ = p.time;
  }
  for (std::size_t i = 0; i < xs_.size(); ++i) paths_[i].x_terminal = xs_[i];
  finished_ = true;
}

RunResult ParticleSystem::take_result() {
  if (!finished_) run();
  for (std::size_t i = 0; i < xs_.size(); ++i) paths_[i].x_terminal = xs_[i];
  return RunResult{std::move(paths_), stats_};
}

RunResult run_system(const Model& model, const FactorDynamics& dynamics,
                     const EngineOptions& options, std::uint64_t seed) {
  ParticleSystem sys(model, dynamics, options, seed);
  sys.run();
  return sys.take_result();
}

std::vector<RunResult> run_replications(const Model& model, const FactorDynamics& dynamics,
                                        const EngineOptions& options, std::uint64_t master_seed,
                                        std::size_t replications, int threads) {
  std::vector<RunResult> out(replications);
  std::exception_ptr failure;
  const auto reps = static_cast<std::ptrdiff_t>(replications);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (std::ptrdiff_t r = 0; r < reps; ++r) {
    try {
      const auto seed =
          derive_seed(master_seed, static_cast<std::uint64_t>(r), StreamRole::replication);
      out[static_cast<std::size_t>(r)] = run_system(model, dynamics, options, seed);
    } catch (...) {
#pragma omp critical(sli_replication_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace sli
