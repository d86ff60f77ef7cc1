#include "sli/factor.hpp"

#include <boost/random/non_central_chi_squared_distribution.hpp>

#include <algorithm>
#include <cmath>

namespace sli {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// (1 - exp(-k t)) / k, continuous at k = 0.
double psi(double k, double t) {
  if (k == 0.0) return t;
  return -std::expm1(-k * t) / k;
}

void require_positive(double y, const char* who) {
  if (!(y > 0.0)) throw DomainError(std::string(who) + ": factor value must be > 0");
}

// Two-point law matching the first two conditional moments of the CIR
// transition. Used below the threshold where the splitting scheme could
// leave the positive half-line.
double cir_moment_matched(double y, double a, double k, double sigma, double dt, Rng& rng) {
  const double ekt = std::exp(-k * dt);
  const double ps = psi(k, dt);
  const double u1 = y * ekt + a * ps;
  const double u2 = u1 * u1 + sigma * sigma * (a * ps * ps / 2.0 + y * ekt * ps);
  const double pi = (1.0 - std::sqrt(std::max(0.0, 1.0 - u1 * u1 / u2))) / 2.0;
  if (uniform01(rng) < pi) return u1 / (2.0 * pi);
  return u1 / (2.0 * (1.0 - pi));
}

// Second-order splitting for dY = (a - kY) dt + sigma sqrt(Y) dW: half an
// ODE step with drift a - sigma^2/4, the exact square-root Brownian flow
// with a three-point variable matching five moments, another half ODE step.
double cir_second_order(double y, double a, double k, double sigma, double dt, Rng& rng) {
  const double s2 = sigma * sigma;
  const double half = std::exp(-k * dt / 2.0);
  const double shift = (a - s2 / 4.0) * psi(k, dt / 2.0);

  double threshold = 0.0;
  if (s2 > 4.0 * a) {
    const double c = (s2 / 4.0 - a) * psi(k, dt / 2.0);
    const double r = std::sqrt(c / half) + sigma * std::sqrt(3.0 * dt) / 2.0;
    threshold = (c + r * r) / half;
  }
  if (y < threshold) return cir_moment_matched(y, a, k, sigma, dt, rng);

  const double u = uniform01(rng);
  double xi = 0.0;
  if (u < 1.0 / 6.0) {
    xi = -std::sqrt(3.0);
  } else if (u < 2.0 / 6.0) {
    xi = std::sqrt(3.0);
  }
  const double inner = std::sqrt(std::max(0.0, shift + half * y)) + sigma * std::sqrt(dt) * xi / 2.0;
  const double out = half * inner * inner + shift;
  if (out > 0.0) return out;
  // Only reachable exactly on the threshold boundary.
  return cir_moment_matched(y, a, k, sigma, dt, rng);
}

double cir_exact(double y, double a, double k, double sigma, double dt, Rng& rng) {
  if (sigma == 0.0) {
    return y * std::exp(-k * dt) + a * psi(k, dt);
  }
  if (!(a > 0.0)) throw DomainError("exact CIR transition needs a positive long-run level");
  const double c = sigma * sigma * psi(k, dt) / 4.0;
  const double dof = 4.0 * a / (sigma * sigma);
  const double noncentrality = y * std::exp(-k * dt) / c;
  boost::random::non_central_chi_squared_distribution<double> chi(dof, noncentrality);
  return c * chi(rng);
}

}  // namespace

double initial_factor(const FactorDynamics& dyn) {
  return std::visit([](const auto& d) { return d.y0; }, dyn);
}

int substep_count(double span, double max_step) {
  if (!(span > 0.0)) return 0;
  if (!(max_step > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::ceil(span / max_step - 1e-9)));
}

double cir_transition(double y, double theta, double kappa, double sigma, double dt,
                      CirScheme scheme, Rng& rng) {
  require_positive(y, "cir_transition");
  if (dt <= 0.0) return y;
  const double a = kappa * theta;
  if (scheme == CirScheme::exact) return cir_exact(y, a, kappa, sigma, dt, rng);
  return cir_second_order(y, a, kappa, sigma, dt, rng);
}

FactorState step_cir(const CirDynamics& dyn, const LocalIntensity& li, FactorState s, int x,
                     double t_to, double max_step, Rng& rng) {
  require_positive(s.y, "step_cir");
  const int n = substep_count(t_to - s.t_last, max_step);
  if (n == 0) return s;
  const double t0 = s.t_last;
  const double dt = (t_to - t0) / n;
  for (int k = 0; k < n; ++k) {
    const double t_left = t0 + k * dt;
    const double theta = li(std::min(t_left, li.horizon()), x);
    s.y = cir_transition(s.y, theta, dyn.kappa, dyn.sigma, dt, dyn.scheme, rng);
  }
  s.t_last = t_to;
  return s;
}

FactorState step_lognormal(const LogNormalDynamics& dyn, FactorState s, double t_to,
                           double max_step, Rng& rng) {
  require_positive(s.y, "step_lognormal");
  const int n = substep_count(t_to - s.t_last, max_step);
  if (n == 0) return s;
  const double dt = (t_to - s.t_last) / n;
  const double half_var = dyn.sigma * dyn.sigma / 2.0;
  const double m = dyn.drift == OuDrift::ito ? -half_var : half_var;
  const double sq = std::sqrt(dt);
  double z = std::log(s.y);
  for (int k = 0; k < n; ++k) {
    z += (-dyn.a * z + m) * dt + dyn.sigma * sq * std_normal(rng);
  }
  s.y = std::exp(z);
  s.t_last = t_to;
  return s;
}

FactorState step_generic(const GenericDynamics& dyn, FactorState s, int x, double t_to,
                         double max_step, Rng& rng) {
  const int n = substep_count(t_to - s.t_last, max_step);
  if (n == 0) return s;
  const double t0 = s.t_last;
  const double dt = (t_to - t0) / n;
  const double sq = std::sqrt(dt);
  for (int k = 0; k < n; ++k) {
    const double t = t0 + k * dt;
    const double b = dyn.drift ? dyn.drift(t, x, s.y) : 0.0;
    const double v = dyn.vol ? dyn.vol(t, x, s.y) : 0.0;
    s.y += b * dt + v * sq * std_normal(rng);
  }
  s.t_last = t_to;
  return s;
}

FactorState advance_factor(const FactorDynamics& dyn, const LocalIntensity& li, FactorState s,
                           int x, double t_to, double max_step, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const CirDynamics& d) { return step_cir(d, li, s, x, t_to, max_step, rng); },
          [&](const LogNormalDynamics& d) { return step_lognormal(d, s, t_to, max_step, rng); },
          [&](const GenericDynamics& d) { return step_generic(d, s, x, t_to, max_step, rng); },
      },
      dyn);
}

FactorState apply_jump(const FactorDynamics& dyn, FactorState s, double t, int x_pre) {
  std::visit(overloaded{
                 [](const CirDynamics&) {},
                 [&](const LogNormalDynamics& d) { s.y *= 1.0 + d.gamma; },
                 [&](const GenericDynamics& d) {
                   if (d.jump) s.y += d.jump(t, x_pre, s.y);
                 },
             },
             dyn);
  return s;
}

bool preserves_positivity(const FactorDynamics& dyn) {
  return !std::holds_alternative<GenericDynamics>(dyn);
}

}  // namespace sli
