#pragma once

#include "sli/model.hpp"
#include "sli/rng.hpp"

#include <functional>
#include <variant>

namespace sli {

enum class CirScheme {
  second_order,  ///< positivity-preserving weak order-2 scheme (default)
  exact,         ///< noncentral chi-square transition; test oracle
};

enum class OuDrift {
  ito,        ///< dZ = (-aZ - sigma^2/2) dt + sigma dW, consistent with Ito on log Y
  plus_half,  ///< dZ = (-aZ + sigma^2/2) dt + sigma dW
};

/// dY = kappa (lambda(t, X_{t-}) - Y) dt + sigma sqrt(Y) dW, no jump term.
struct CirDynamics {
  double kappa = 1.0;
  double sigma = 0.3;
  double y0 = 1.0;
  CirScheme scheme = CirScheme::second_order;
};

/// dY = -a Y log Y dt + sigma Y dW + gamma Y_{t-} dX, stepped as an
/// Ornstein-Uhlenbeck process on Z = log Y between loss jumps.
struct LogNormalDynamics {
  double a = 1.0;
  double sigma = 0.3;
  double gamma = 1.0;
  double y0 = 1.0;
  OuDrift drift = OuDrift::ito;
};

/// dY = b(t, X, Y) dt + s(t, X, Y) dW + g(t-, X_{t-}, Y_{t-}) dX, Euler
/// stepped. The coefficients are expected to have sub-linear growth in y;
/// this is a documented precondition and is not checked.
struct GenericDynamics {
  using Coefficient = std::function<double(double t, int x, double y)>;
  Coefficient drift;
  Coefficient vol;
  Coefficient jump;
  double y0 = 1.0;
};

using FactorDynamics = std::variant<CirDynamics, LogNormalDynamics, GenericDynamics>;

/// Factor value Y and the time it was last discretized.
struct FactorState {
  double y = 1.0;
  double t_last = 0.0;
};

double initial_factor(const FactorDynamics& dyn);

/// Number of equal sub-steps needed so none exceeds max_step.
int substep_count(double span, double max_step);

/// One CIR transition of length dt with constant long-run level theta.
double cir_transition(double y, double theta, double kappa, double sigma, double dt,
                      CirScheme scheme, Rng& rng);

FactorState step_cir(const CirDynamics& dyn, const LocalIntensity& li, FactorState s, int x,
                     double t_to, double max_step, Rng& rng);
FactorState step_lognormal(const LogNormalDynamics& dyn, FactorState s, double t_to,
                           double max_step, Rng& rng);
FactorState step_generic(const GenericDynamics& dyn, FactorState s, int x, double t_to,
                         double max_step, Rng& rng);

/// Advances s to t_to with loss level x held fixed, splitting the interval
/// into sub-steps of length at most max_step.
FactorState advance_factor(const FactorDynamics& dyn, const LocalIntensity& li, FactorState s,
                           int x, double t_to, double max_step, Rng& rng);

/// Y <- Y + gamma(t-, x_pre, Y) at a loss jump.
FactorState apply_jump(const FactorDynamics& dyn, FactorState s, double t, int x_pre);

/// Whether the dynamics guarantee Y > 0 along every path.
bool preserves_positivity(const FactorDynamics& dyn);

}  // namespace sli
