#pragma once

#include "sli/factor.hpp"
#include "sli/model.hpp"
#include "sli/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sli {

enum class Algorithm {
  naive,     ///< conditional expectation rescanned at every proposal, O(DN + N^2)
  improved,  ///< per-level aggregates, recomputed at grid dates only, O(DN)
};

enum class AggregateMode {
  incremental,       ///< O(1) update of the two affected levels per accepted jump
  forced_recompute,  ///< full recompute after every accepted jump (equivalence tests)
};

/// Product initial law: X_0 from a pmf over {0..M} (Dirac at x0 when empty),
/// Y_0 = the dynamics' y0.
struct InitialLaw {
  int x0 = 0;
  std::vector<double> x_pmf;

  friend bool operator==(const InitialLaw&, const InitialLaw&) = default;
};

struct EngineOptions {
  std::size_t n = 1000;
  std::size_t d = 100;
  Algorithm algorithm = Algorithm::improved;
  AggregateMode aggregate_mode = AggregateMode::incremental;
  InitialLaw initial;
  bool record_y_grid = false;
  bool check_invariants = false;
  bool parallel_advance = false;
};

/// N^j and D^j: particle count and sum of f(Y) per loss level.
struct AggregateTable {
  std::vector<std::int64_t> count;
  std::vector<double> fsum;

  void recompute(std::span<const int> xs, std::span<const double> ys, const ClampF& f);
};

/// One particle's (or one LI path's) trajectory summary.
struct PathRecord {
  std::vector<double> jump_times;
  int x_initial = 0;
  int x_terminal = 0;
  std::vector<double> y_grid;
};

struct RunStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  std::uint64_t ratio_evaluations = 0;
  std::uint64_t recomputes = 0;
  double min_ratio = 1.0;
  double max_ratio = 0.0;
  // Only populated with EngineOptions::check_invariants.
  std::uint64_t ratio_violations = 0;
  std::uint64_t conservation_violations = 0;
  std::uint64_t definitional_violations = 0;
  double max_fsum_drift = 0.0;
};

struct RunResult {
  std::vector<PathRecord> paths;
  RunStats stats;
};

/// The thinning acceptance probability for a particle with factor weight
/// f(Y) = fy at a level holding `count` particles whose weights sum to fsum.
inline double thinning_ratio(double inv_bound, double lambda, double fy, std::int64_t count,
                             double fsum) {
  return inv_bound * lambda * fy * (static_cast<double>(count) / fsum);
}

/// N interacting particles driven by one globally ordered event loop.
///
/// Randomness: the system stream draws proposal times and the candidate
/// particle; each particle owns a Brownian stream (factor steps) and a
/// jump-decision stream (the acceptance uniform). See rng.hpp.
class ParticleSystem {
 public:
  struct Proposal {
    double time = 0.0;
    std::size_t particle = 0;
  };

  ParticleSystem(Model model, FactorDynamics dynamics, EngineOptions options, std::uint64_t seed);

  /// t' = t + Exp(N * proposal rate), then a uniform particle index.
  Proposal propose_next_event();

  /// Moves every particle to grid date s_k (k > current grid index) and, for
  /// the improved algorithm, rebuilds the aggregates from scratch.
  void advance_to_grid(std::size_t k);

  /// Acceptance probability of a proposal for particle i at t_prop, using
  /// the stored (last discretized) factor values.
  double acceptance_ratio(double t_prop, std::size_t i) const;

  /// Moves particle i up one loss level at t_prop and updates the aggregates.
  void apply_jump_event(double t_prop, std::size_t i);

  /// Runs the event loop to the horizon.
  void run();

  RunResult take_result();

  double time() const noexcept { return t_; }
  std::size_t grid_index() const noexcept { return k_; }
  double grid_date(std::size_t k) const noexcept;
  double grid_step() const noexcept { return h_; }
  std::size_t size() const noexcept { return xs_.size(); }
  std::span<const int> levels() const noexcept { return xs_; }
  std::span<const double> factors() const noexcept { return ys_; }
  std::span<const double> last_update() const noexcept { return t_last_; }
  const AggregateTable& aggregates() const noexcept { return agg_; }
  const RunStats& stats() const noexcept { return stats_; }
  const std::vector<PathRecord>& paths() const noexcept { return paths_; }
  const Model& model() const noexcept { return model_; }
  bool finished() const noexcept { return finished_; }

 private:
  void check_aggregates_against_definition(bool exact);
  void record_ratio(double r);
  void advance_particles(double target);

  Model model_;
  FactorDynamics dyn_;
  EngineOptions opt_;
  double horizon_;
  double h_;
  double inv_bound_;
  double system_rate_;

  std::vector<int> xs_;
  std::vector<double> ys_;
  std::vector<double> t_last_;
  std::vector<Rng> brownian_;
  std::vector<Rng> jump_decision_;
  Rng system_;
  AggregateTable agg_;
  std::vector<PathRecord> paths_;
  RunStats stats_;
  double t_ = 0.0;
  std::size_t k_ = 0;
  bool finished_ = false;
};

RunResult run_system(const Model& model, const FactorDynamics& dynamics,
                     const EngineOptions& options, std::uint64_t seed);

/// Independent replications with seeds derive_seed(master, r, replication),
/// executed in parallel over `threads` OpenMP threads (0 = runtime default).
std::vector<RunResult> run_replications(const Model& model, const FactorDynamics& dynamics,
                                        const EngineOptions& options, std::uint64_t master_seed,
                                        std::size_t replications, int threads = 0);

}  // namespace sli
