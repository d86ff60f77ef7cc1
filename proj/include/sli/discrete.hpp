#pragma once

// Discrete-factor case: the factor Y lives on {0..J-1}, moves with rate
// matrices mu^x that depend on the loss level, and the joint law p(t, i, j)
// solves a non-linear forward (Fokker-Planck) ODE system. Both the ODE and
// the joint Markov chain it defines are implemented so they can be checked
// against each other.

#include "sli/model.hpp"
#include "sli/rng.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sli {

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// One J x J generator per loss level 0..M.
class GeneratorFamily {
 public:
  GeneratorFamily() = default;
  /// rates[(level * J + from) * J + to]
  GeneratorFamily(int m, int j, std::vector<double> rates);
  /// All levels share one generator.
  static GeneratorFamily uniform(int m, int j, const std::vector<double>& generator);
  static GeneratorFamily zero(int m, int j);
  /// {"m": M, "j": J, "generators": [ [[...J...] x J] x (M+1) ]}
  static GeneratorFamily from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  double rate(int level, int from, int to) const {
    return rates_[(static_cast<std::size_t>(level) * j_ + from) * j_ + to];
  }
  int m() const noexcept { return m_; }
  int j() const noexcept { return j_; }
  /// sup over levels and states of |mu_ii|.
  double max_exit_rate() const;
  /// Generator checks: off-diagonals >= 0, diagonals <= 0, rows sum to 0.
  std::vector<std::string> validate(double row_tol = 1e-12) const;

 private:
  int m_ = 0;
  int j_ = 0;
  std::vector<double> rates_;
};

/// P[i][j] ~ P(X_t = i, Y_t = j), stored row-major over (i, j).
struct FpState {
  double t = 0.0;
  int m = 0;
  int j = 0;
  std::vector<double> p;

  double& at(int i, int y) { return p[static_cast<std::size_t>(i) * j + y]; }
  double at(int i, int y) const { return p[static_cast<std::size_t>(i) * j + y]; }
  double mass() const;
  double min_entry() const;
  /// P(X_t = i).
  double level_mass(int i) const;
  /// P(Y_t = y).
  double factor_mass(int y) const;

  static FpState dirac(int m, int j, int x0, int y0);
};

/// Columns with mass at or below this are treated as empty.
inline constexpr double kEmptyColumnMass = 1e-14;

/// phi(i) = sum_j f(j) p_ij / sum_j p_ij over the positive part of p;
/// f_low when the column is empty.
double phi(std::span<const double> p, int j_count, int i, std::span<const double> fvals,
           double f_low);

/// Right-hand side of P' = Psi(t, P_+).
std::vector<double> psi_plus(double t, std::span<const double> p, const Model& model,
                             const GeneratorFamily& gen, std::span<const double> fvals);

/// Lipschitz constant 2 sup|mu_ii| + 2 lambda_bar (1 + 2 f_high / f_low).
double psi_lipschitz_bound(const Model& model, const GeneratorFamily& gen);

struct FpOptions {
  double t_end = 1.0;
  double dt = 1e-3;
  std::size_t output_every = 1;
  double tol_pos = 1e-10;
  double tol_mass = 1e-8;
};

/// phi(t, i) on the solver's time grid; linear interpolation in t.
class PhiTable {
 public:
  PhiTable() = default;
  PhiTable(double dt, int m, std::vector<double> values)
      : dt_(dt), m_(m), values_(std::move(values)) {}
  double operator()(double t, int i) const;
  std::size_t steps() const noexcept {
    return values_.size() / (static_cast<std::size_t>(m_) + 1);
  }

 private:
  double dt_ = 0.0;
  int m_ = 0;
  std::vector<double> values_;
};

struct FpTrajectory {
  std::vector<FpState> snapshots;
  PhiTable phi;
  double min_entry = 0.0;
  double max_mass_error = 0.0;
};

/// Fixed-step classical RK4. Throws NumericalFailure when positivity or mass
/// leaves the configured tolerance.
FpTrajectory solve_fp(const FpState& p0, const Model& model, const GeneratorFamily& gen,
                      std::span<const double> fvals, const FpOptions& opt);

struct CtmcPath {
  int x_terminal = 0;
  int y_terminal = 0;
  std::vector<double> jump_times;
};

/// Joint chain with X-jump rate f(y) lambda(t-, x) / phi(t, x) and factor
/// moves at rates mu^x, thinned against lambda_bar f_high / f_low + sup|mu_ii|.
CtmcPath simulate_joint_ctmc(const Model& model, const GeneratorFamily& gen,
                             std::span<const double> fvals, int x0, int y0, double t_end,
                             const PhiTable& phi_table, Rng& rng);

/// Empirical joint pmf of (X, Y) at t_end from n independent chains.
std::vector<double> ctmc_joint_pmf(const Model& model, const GeneratorFamily& gen,
                                   std::span<const double> fvals, int x0, int y0, double t_end,
                                   const PhiTable& phi_table, std::size_t n_paths,
                                   std::uint64_t seed, int threads = 0);

}  // namespace sli
