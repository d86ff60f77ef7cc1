#include "sli/discrete.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

namespace sli {

GeneratorFamily::GeneratorFamily(int m, int j, std::vector<double> rates)
    : m_(m), j_(j), rates_(std::move(rates)) {
  if (m < 1 || j < 1) throw DomainError("generator family needs M >= 1 and J >= 1");
  if (rates_.size() != static_cast<std::size_t>(m + 1) * j * j) {
    throw DomainError("generator family: expected (M+1) * J * J rates");
  }
}

GeneratorFamily GeneratorFamily::uniform(int m, int j, const std::vector<double>& generator) {
  if (generator.size() != static_cast<std::size_t>(j) * j) {
    throw DomainError("generator must be J x J");
  }
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(m + 1) * j * j);
  for (int k = 0; k <= m; ++k) rates.insert(rates.end(), generator.begin(), generator.end());
  return GeneratorFamily(m, j, std::move(rates));
}

GeneratorFamily GeneratorFamily::zero(int m, int j) {
  return GeneratorFamily(m, j, std::vector<double>(static_cast<std::size_t>(m + 1) * j * j, 0.0));
}

GeneratorFamily GeneratorFamily::from_json(const nlohmann::json& doc) {
  const int m = doc.at("m").get<int>();
  const int j = doc.at("j").get<int>();
  const auto& gens = doc.at("generators");
  if (!gens.is_array() || gens.size() != static_cast<std::size_t>(m) + 1) {
    throw DomainError("generators: expected M + 1 matrices");
  }
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(m + 1) * j * j);
  for (const auto& mat : gens) {
    if (!mat.is_array() || mat.size() != static_cast<std::size_t>(j)) {
      throw DomainError("generators: each matrix must have J rows");
    }
    for (const auto& row : mat) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(j)) {
        throw DomainError("generators: each row must have J entries");
      }
      for (const auto& v : row) rates.push_back(v.get<double>());
    }
  }
  return GeneratorFamily(m, j, std::move(rates));
}

nlohmann::json GeneratorFamily::to_json() const {
  nlohmann::json gens = nlohmann::json::array();
  for (int k = 0; k <= m_; ++k) {
    nlohmann::json mat = nlohmann::json::array();
    for (int a = 0; a < j_; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (int b = 0; b < j_; ++b) row.push_back(rate(k, a, b));
      mat.push_back(row);
    }
    gens.push_back(mat);
  }
  return {{"m", m_}, {"j", j_}, {"generators", gens}};
}

double GeneratorFamily::max_exit_rate() const {
  double s = 0.0;
  for (int k = 0; k <= m_; ++k) {
    for (int a = 0; a < j_; ++a) s = std::max(s, std::abs(rate(k, a, a)));
  }
  return s;
}

std::vector<std::string> GeneratorFamily::validate(double row_tol) const {
  std::vector<std::string> errs;
  for (int k = 0; k <= m_; ++k) {
    for (int a = 0; a < j_; ++a) {
      double row = 0.0;
      for (int b = 0; b < j_; ++b) {
        const double r = rate(k, a, b);
        row += r;
        if (a != b && r < 0.0) {
          std::ostringstream os;
          os << "level " << k << ": negative off-diagonal rate (" << a << ", " << b << ")";
          errs.push_back(os.str());
        }
        if (a == b && r > 0.0) {
          std::ostringstream os;
          os << "level " << k << ": positive diagonal rate at " << a;
          errs.push_back(os.str());
        }
      }
      if (std::abs(row) > row_tol) {
        std::ostringstream os;
        os << "level " << k << ": row " << a << " sums to " << row << ", not 0";
        errs.push_back(os.str());
      }
    }
  }
  return errs;
}

double FpState::mass() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

double FpState::min_entry() const { return *std::min_element(p.begin(), p.end()); }

double FpState::level_mass(int i) const {
  double s = 0.0;
  for (int y = 0; y < j; ++y) s += at(i, y);
  return s;
}

double FpState::factor_mass(int y) const {
  double s = 0.0;
  for (int i = 0; i <= m; ++i) s += at(i, y);
  return s;
}

FpState FpState::dirac(int m, int j, int x0, int y0) {
  if (x0 < 0 || x0 > m || y0 < 0 || y0 >= j) throw DomainError("Dirac initial state out of range");
  FpState s;
  s.m = m;
  s.j = j;
  s.p.assign(static_cast<std::size_t>(m + 1) * j, 0.0);
  s.at(x0, y0) = 1.0;
  return s;
}

double phi(std::span<const double> p, int j_count, int i, std::span<const double> fvals,
           double f_low) {
  double mass = 0.0;
  double weighted = 0.0;
  const std::size_t base = static_cast<std::size_t>(i) * j_count;
  for (int y = 0; y < j_count; ++y) {
    const double v = std::max(p[base + y], 0.0);
    mass += v;
    weighted += fvals[static_cast<std::size_t>(y)] * v;
  }
  if (mass <= kEmptyColumnMass) return f_low;
  return weighted / mass;
}

namespace {

void check_fvals(const Model& model, std::span<const double> fvals, int j) {
  if (fvals.size() != static_cast<std::size_t>(j)) throw DomainError("need one f value per factor state");
  for (double v : fvals) {
    if (v < model.params.f_low || v > model.params.f_high) {
      throw DomainError("factor values must lie in [f_low, f_high]");
    }
  }
}

// out = Psi(t, p_+); scratch-free so RK4 stages can call it repeatedly.
void psi_plus_into(double t, std::span<const double> p, const Model& model,
                   const GeneratorFamily& gen, std::span<const double> fvals,
                   std::vector<double>& out) {
  const int m = gen.m();
  const int jn = gen.j();
  const double f_low = model.params.f_low;
  out.assign(p.size(), 0.0);
  std::vector<double> scale(static_cast<std::size_t>(m) + 1, 0.0);
  for (int i = 0; i <= m; ++i) {
    double mass = 0.0;
    const std::size_t base = static_cast<std::size_t>(i) * jn;
    for (int y = 0; y < jn; ++y) mass += std::max(p[base + y], 0.0);
    if (i < m && mass > kEmptyColumnMass) {
      // lambda / phi; empty columns contribute nothing (continuity extension)
      scale[static_cast<std::size_t>(i)] =
          model.intensity(t, i) / phi(p, jn, i, fvals, f_low);
    }
  }
  for (int i = 0; i <= m; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * jn;
    for (int y = 0; y < jn; ++y) {
      double d = 0.0;
      for (int k = 0; k < jn; ++k) d += gen.rate(i, k, y) * std::max(p[base + k], 0.0);
      const double fy = fvals[static_cast<std::size_t>(y)];
      if (i >= 1) {
        d += scale[static_cast<std::size_t>(i - 1)] * fy * std::max(p[base - jn + y], 0.0);
      }
      if (i <= m - 1) d -= scale[static_cast<std::size_t>(i)] * fy * std::max(p[base + y], 0.0);
      out[base + y] = d;
    }
  }
}

}  // namespace

std::vector<double> psi_plus(double t, std::span<const double> p, const Model& model,
                             const GeneratorFamily& gen, std::span<const double> fvals) {
  if (p.size() != static_cast<std::size_t>(gen.m() + 1) * gen.j()) {
    throw DomainError("psi_plus: state size does not match the generator family");
  }
  check_fvals(model, fvals, gen.j());
  std::vector<double> out;
  psi_plus_into(t, p, model, gen, fvals, out);
  return out;
}

double psi_lipschitz_bound(const Model& model, const GeneratorFamily& gen) {
  const auto& p = model.params;
  return 2.0 * gen.max_exit_rate() + 2.0 * p.lambda_bar * (1.0 + 2.0 * p.f_high / p.f_low);
}

double PhiTable::operator()(double t, int i) const {
  const std::size_t n = steps();
  const std::size_t stride = static_cast<std::size_t>(m_) + 1;
  if (n == 0) throw DomainError("empty phi table");
  if (t <= 0.0 || n == 1) return values_[static_cast<std::size_t>(i)];
  const double pos = t / dt_;
  auto k = static_cast<std::size_t>(pos);
  if (k >= n - 1) return values_[(n - 1) * stride + i];
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values_[k * stride + i] + w * values_[(k + 1) * stride + i];
}

FpTrajectory solve_fp(const FpState& p0, const Model& model, const GeneratorFamily& gen,
                      std::span<const double> fvals, const FpOptions& opt) {
  if (gen.m() != model.params.m || p0.m != gen.m() || p0.j != gen.j()) {
    throw DomainError("solve_fp: dimensions of model, generators and initial state differ");
  }
  if (auto errs = gen.validate(); !errs.empty()) {
    throw DomainError("solve_fp: invalid generator family: " + errs.front());
  }
  check_fvals(model, fvals, gen.j());
  if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0)) throw DomainError("solve_fp: need dt > 0, t_end >= 0");
  if (opt.t_end > model.intensity.horizon()) {
    throw DomainError("solve_fp: t_end beyond the intensity horizon");
  }
  if (p0.min_entry() < 0.0 || std::abs(p0.mass() - 1.0) > opt.tol_mass) {
    throw DomainError("solve_fp: initial state must be a probability vector");
  }

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(opt.t_end / opt.dt)));
  const double dt = opt.t_end / static_cast<double>(steps);
  const int m = gen.m();
  const int jn = gen.j();
  const std::size_t every = std::max<std::size_t>(1, opt.output_every);

  FpTrajectory traj;
  std::vector<double> phis;
  phis.reserve((steps + 1) * static_cast<std::size_t>(m + 1));
  auto push_phi = [&](const std::vector<double>& p) {
    for (int i = 0; i <= m; ++i) phis.push_back(phi(p, jn, i, fvals, model.params.f_low));
  };

  std::vector<double> p = p0.p;
  std::vector<double> k1, k2, k3, k4, stage(p.size());
  traj.snapshots.push_back(FpState{0.0, m, jn, p});
  traj.min_entry = p0.min_entry();
  traj.max_mass_error = std::abs(p0.mass() - 1.0);
  push_phi(p);

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = dt * static_cast<double>(n);
    psi_plus_into(t, p, model, gen, fvals, k1);
    for (std::size_t q = 0; q < p.size(); ++q) stage[q] = p[q] + 0.5 * dt * k1[q];
    psi_plus_into(t + 0.5 * dt, stage, model, gen, fvals, k2);
    for (std::size_t q = 0; q < p.size(); ++q) stage[q] = p[q] + 0.5 * dt * k2[q];
    psi_plus_into(t + 0.5 * dt, stage, model, gen, fvals, k3);
    for (std::size_t q = 0; q < p.size(); ++q) stage[q] = p[q] + dt * k3[q];
    psi_plus_into(std::min(t + dt, opt.t_end), stage, model, gen, fvals, k4);
    for (std::size_t q = 0; q < p.size(); ++q) {
      p[q] += dt / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
    }

    const double t_next = n + 1 == steps ? opt.t_end : dt * static_cast<double>(n + 1);
    double mass = 0.0;
    double low = p.front();
    for (double v : p) {
      mass += v;
      low = std::min(low, v);
    }
    traj.min_entry = std::min(traj.min_entry, low);
    traj.max_mass_error = std::max(traj.max_mass_error, std::abs(mass - 1.0));
    if (low < -opt.tol_pos) {
      throw NumericalFailure("solve_fp: negative probability beyond tolerance", t_next);
    }
    if (std::abs(mass - 1.0) > opt.tol_mass) {
      throw NumericalFailure("solve_fp: probability mass drifted beyond tolerance", t_next);
    }
    push_phi(p);
    if ((n + 1) % every == 0 || n + 1 == steps) {
      traj.snapshots.push_back(FpState{t_next, m, jn, p});
    }
  }
  traj.phi = PhiTable(dt, m, std::move(phis));
  return traj;
}

CtmcPath simulate_joint_ctmc(const Model& model, const GeneratorFamily& gen,
                             std::span<const double> fvals, int x0, int y0, double t_end,
                             const PhiTable& phi_table, Rng& rng) {
  const int m = gen.m();
  const int jn = gen.j();
  const double bound =
      model.params.lambda_bar * model.params.f_high / model.params.f_low + gen.max_exit_rate();
  CtmcPath path;
  int x = x0;
  int y = y0;
  if (bound <= 0.0) {
    path.x_terminal = x;
    path.y_terminal = y;
    return path;
  }
  double t = 0.0;
  while (true) {
    t += exponential(rng, bound);
    if (t > t_end) break;
    const double u = uniform01(rng) * bound;
    const double fy = fvals[static_cast<std::size_t>(y)];
    const double rx = x < m ? fy * model.intensity.left_limit(t, x) / phi_table(t, x) : 0.0;
    if (u < rx) {
      ++x;
      path.jump_times.push_back(t);
      continue;
    }
    double acc = rx;
    for (int k = 0; k < jn; ++k) {
      if (k == y) continue;
      acc += gen.rate(x, y, k);
      if (u < acc) {
        y = k;
        break;
      }
    }
  }
  path.x_terminal = x;
  path.y_terminal = y;
  return path;
}

std::vector<double> ctmc_joint_pmf(const Model& model, const GeneratorFamily& gen,
                                   std::span<const double> fvals, int x0, int y0, double t_end,
                                   const PhiTable& phi_table, std::size_t n_paths,
                                   std::uint64_t seed, int threads) {
  check_fvals(model, fvals, gen.j());
  const int jn = gen.j();
  const std::size_t cells = static_cast<std::size_t>(gen.m() + 1) * jn;
  std::vector<int> terminal(n_paths);
  const auto n = static_cast<std::ptrdiff_t>(n_paths);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(i), StreamRole::path);
      const auto path = simulate_joint_ctmc(model, gen, fvals, x0, y0, t_end, phi_table, rng);
      terminal[static_cast<std::size_t>(i)] = path.x_terminal * jn + path.y_terminal;
    } catch (...) {
#pragma omp critical(sli_ctmc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<double> pmf(cells, 0.0);
  for (int c : terminal) pmf[static_cast<std::size_t>(c)] += 1.0;
  for (double& v : pmf) v /= static_cast<double>(n_paths);
  return pmf;
}

}  // namespace sli
