#include "sli/commands.hpp"

#include "sli/discrete.hpp"
#include "sli/estimators.hpp"
#include "sli/io.hpp"
#include "sli/li_engine.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifndef SLI_GIT_DESCRIBE
#define SLI_GIT_DESCRIBE "unknown"
#endif

namespace sli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

bool is_li(const ExperimentConfig& cfg) { return cfg.experiment.model == "li"; }

/// Path sets for the configured experiment: one LI batch, or one batch per
/// SLI replication.
std::vector<std::vector<PathRecord>> simulate_paths(const ExperimentConfig& cfg, int threads,
                                                    RunStats* totals) {
  const Model model = build_model(cfg);
  std::vector<std::vector<PathRecord>> out;
  if (is_li(cfg)) {
    out.push_back(simulate_li_paths(model, cfg.engine.n, cfg.engine.x0, cfg.engine.seed, threads));
    return out;
  }
  auto runs = run_replications(model, build_dynamics(cfg.factor), build_engine_options(cfg),
                               cfg.engine.seed, cfg.engine.replications, threads);
  for (auto& r : runs) {
    if (totals) {
      totals->proposals += r.stats.proposals;
      totals->accepted += r.stats.accepted;
    }
    out.push_back(std::move(r.paths));
  }
  return out;
}

std::vector<PathRecord> pooled(std::vector<std::vector<PathRecord>>&& batches) {
  std::vector<PathRecord> all;
  for (auto& b : batches) {
    for (auto& p : b) all.push_back(std::move(p));
  }
  return all;
}

bool oracle_applies(const ExperimentConfig& cfg) {
  return cfg.intensity.kind == "linear-decay" && cfg.engine.x0 == 0 && cfg.engine.x_pmf.empty();
}

CommandResult cmd_simulate(const ExperimentConfig& cfg, const fs::path& out, int threads) {
  CommandResult res;
  RunStats totals;
  const auto batches = simulate_paths(cfg, threads, &totals);
  io::write_paths_csv(out / "paths.csv", batches);
  std::vector<PathRecord> all;
  for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
  io::write_histogram(out / "terminal_histogram.bin", io::histogram_of(all, cfg.model.m));
  double mean_x = 0.0;
  for (const auto& p : all) mean_x += p.x_terminal;
  mean_x /= static_cast<double>(all.size());
  res.meta["payload"] = {{"paths", all.size()},
                         {"mean_terminal_loss", mean_x},
                         {"proposals", totals.proposals},
                         {"accepted", totals.accepted}};
  res.artifacts = {"paths.csv", "terminal_histogram.bin"};
  res.summary = "simulate: " + std::to_string(all.size()) + " paths, mean X_T = " +
                fixed(mean_x, 4) + ", " + std::to_string(totals.accepted) + " accepted jumps";
  return res;
}

CommandResult cmd_marginals(const ExperimentConfig& cfg, const fs::path& out, int threads) {
  CommandResult res;
  const auto paths = pooled(simulate_paths(cfg, threads, nullptr));
  const PmfEstimate pmf = marginal_pmf(paths, cfg.model.m);
  io::write_pmf_csv(out / "pmf.csv", pmf);
  res.artifacts = {"pmf.csv"};
  res.meta["payload"] = {{"paths", paths.size()}};
  res.summary = "marginals: " + std::to_string(paths.size()) + " paths";
  if (oracle_applies(cfg)) {
    const auto oracle = binomial_oracle_pmf(build_intensity(cfg), cfg.model.horizon);
    io::write_pmf_csv(out / "oracle.csv", oracle);
    const double tv = total_variation(pmf.probs, oracle);
    res.artifacts.push_back("oracle.csv");
    res.meta["payload"]["tv_to_binomial"] = tv;
    res.summary += ", TV distance to binomial oracle = " + fixed(tv, 5);
  }
  return res;
}

CommandResult cmd_asian(const ExperimentConfig& cfg, const fs::path& out, int threads) {
  CommandResult res;
  const auto paths = pooled(simulate_paths(cfg, threads, nullptr));
  std::vector<double> payoffs;
  payoffs.reserve(paths.size());
  for (const auto& p : paths) payoffs.push_back(asian_payoff(p, cfg.experiment.strike, cfg.model.horizon));
  io::write_sample_csv(out / "asian_payoffs.csv", payoffs);
  const auto est = sample_mean(payoffs);
  json payload = {{"strike", cfg.experiment.strike},
                  {"value", est.value},
                  {"stderr", est.std_error},
                  {"n_samples", est.n_samples}};
  io::write_json(out / "asian.json", payload);
  res.meta["payload"] = payload;
  res.artifacts = {"asian_payoffs.csv", "asian.json"};
  res.summary = "asian: K = " + fixed(cfg.experiment.strike, 4) + ", price = " +
                fixed(est.value, 5) + " (+-" + fixed(2.0 * est.std_error, 5) + ")";
  return res;
}

CommandResult cmd_tau_cdf(const ExperimentConfig& cfg, const fs::path& out, int threads) {
  CommandResult res;
  const auto paths = pooled(simulate_paths(cfg, threads, nullptr));
  const auto thresholds = tau_thresholds(cfg);
  const auto cdf = tau_cdf(paths, thresholds, cfg.model.horizon, gap_convention(cfg));
  io::write_cdf_csv(out / "tau_cdf.csv", thresholds, cdf);
  std::ostringstream table;
  table << "threshold\tP(tau <= threshold)\n";
  json rows = json::array();
  res.summary = "tau-cdf:";
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    const std::string cell = fixed(cdf[k].value, 4) + " (+-" + fixed(2.0 * cdf[k].std_error, 4) + ")";
    table << io::format_double(thresholds[k]) << '\t' << cell << '\n';
    rows.push_back({{"threshold", thresholds[k]},
                    {"value", cdf[k].value},
                    {"stderr", cdf[k].std_error}});
    res.summary += " P(tau <= " + fixed(thresholds[k], 4) + ") = " + cell + ";";
  }
  res.summary.pop_back();
  io::write_text(out / "tau_table.txt", table.str());
  res.meta["payload"] = {{"paths", paths.size()}, {"cdf", rows}};
  res.artifacts = {"tau_cdf.csv", "tau_table.txt"};
  return res;
}

CommandResult cmd_convergence(const ExperimentConfig& cfg, const fs::path& out, int threads) {
  CommandResult res;
  const SystemSetup setup = build_setup(cfg);
  ConvergenceStudy study;
  study.n_values = cfg.experiment.n_values;
  if (study.n_values.empty()) {
    for (std::size_t n = 100; n <= 3200; n += 100) study.n_values.push_back(n);
  }
  study.reps_per_n = cfg.experiment.reps_per_n;
  study.estimators = build_estimators(cfg);
  const auto refs =
      build_reference(setup, study.estimators, cfg.experiment.reference_n,
                      cfg.experiment.reference_reps,
                      derive_seed(cfg.engine.seed, 0, StreamRole::reference), threads);
  const auto results = run_study(study, setup, refs, cfg.engine.seed, threads);

  json regs = json::array();
  res.summary = "convergence:";
  for (const auto& r : results) {
    const std::string name = to_string(r.estimator.kind);
    io::write_convergence_csv(out / ("convergence_" + name + ".csv"), r.rows);
    res.artifacts.push_back("convergence_" + name + ".csv");
    regs.push_back({{"estimator", name},
                    {"alpha", r.regression.alpha},
                    {"beta", r.regression.beta},
                    {"resid_var", r.regression.resid_var},
                    {"points", r.regression.points},
                    {"excluded_n", r.excluded_n},
                    {"reference", r.reference.value},
                    {"reference_stderr", r.reference.std_error},
                    {"spearman_rho", r.mse_vs_n.rho},
                    {"spearman_p", r.mse_vs_n.p_value}});
    res.summary += " " + name + " alpha = " + fixed(r.regression.alpha, 4) + ", beta = " +
                   fixed(r.regression.beta, 4) + ";";
  }
  io::write_json(out / "regression.json", regs);
  res.artifacts.push_back("regression.json");
  json payload = {{"regressions", regs}};

  if (cfg.experiment.clt_systems > 0) {
    EstimatorSpec spec;
    spec.kind = EstimatorKind::pmf_point;
    spec.level = cfg.experiment.pmf_level;
    const auto clt = clt_histogram(setup, cfg.experiment.clt_particles, cfg.experiment.clt_systems,
                                   spec, derive_seed(cfg.engine.seed, 1, StreamRole::reference),
                                   threads);
    io::write_sample_csv(out / "clt_sample.csv", clt.standardized);
    json c = {{"mean", clt.mean},
              {"std_dev", clt.std_dev},
              {"skewness", clt.skewness},
              {"excess_kurtosis", clt.excess_kurtosis},
              {"degenerate", clt.degenerate}};
    io::write_json(out / "clt.json", c);
    res.artifacts.insert(res.artifacts.end(), {"clt_sample.csv", "clt.json"});
    payload["clt"] = c;
    res.summary += " clt skewness = " + fixed(clt.skewness, 3) + ", excess kurtosis = " +
                   fixed(clt.excess_kurtosis, 3) + ";";
  }
  res.summary.pop_back();
  res.meta["payload"] = payload;
  return res;
}

GeneratorFamily load_generators(const ExperimentConfig& cfg) {
  if (cfg.discrete.generator_file.empty()) {
    throw ConfigError({"discrete.generator_file: required for fokker-planck"});
  }
  fs::path p(cfg.discrete.generator_file);
  if (p.is_relative() && !cfg.base_dir.empty()) p = cfg.base_dir / p;
  std::ifstream in(p);
  if (!in) throw ConfigError({"discrete.generator_file: cannot open '" + p.string() + "'"});
  return GeneratorFamily::from_json(json::parse(in));
}

CommandResult cmd_fokker_planck(const ExperimentConfig& cfg, const fs::path& out, int threads) {
  CommandResult res;
  const Model model = build_model(cfg);
  const GeneratorFamily gen = load_generators(cfg);
  if (gen.m() != cfg.model.m) throw ConfigError({"discrete.generator_file: m differs from model.m"});
  if (const auto errs = gen.validate(); !errs.empty()) {
    std::vector<std::string> named;
    for (const auto& e : errs) named.push_back("discrete.generator_file: " + e);
    throw ConfigError(named);
  }
  const auto& fvals = cfg.discrete.f_values;
  FpOptions opt;
  opt.t_end = cfg.model.horizon;
  opt.dt = cfg.discrete.dt;
  opt.output_every = cfg.discrete.output_every;
  const FpState p0 = FpState::dirac(cfg.model.m, gen.j(), cfg.engine.x0, cfg.discrete.y0);
  const FpTrajectory traj = solve_fp(p0, model, gen, fvals, opt);
  io::write_fp_csv(out / "fp.csv", traj.snapshots);
  res.artifacts = {"fp.csv"};
  json payload = {{"min_entry", traj.min_entry},
                  {"max_mass_error", traj.max_mass_error},
                  {"lipschitz_bound", psi_lipschitz_bound(model, gen)}};
  res.summary = "fokker-planck: min entry = " + io::format_double(traj.min_entry) +
                ", max |mass - 1| = " + io::format_double(traj.max_mass_error);
  if (cfg.discrete.ctmc_paths > 0) {
    const auto emp = ctmc_joint_pmf(model, gen, fvals, cfg.engine.x0, cfg.discrete.y0,
                                    cfg.model.horizon, traj.phi, cfg.discrete.ctmc_paths,
                                    cfg.engine.seed, threads);
    const FpState& last = traj.snapshots.back();
    const double n = static_cast<double>(cfg.discrete.ctmc_paths);
    double max_z = 0.0;
    std::ostringstream body;
    body << "i,j,fp,ctmc,stderr\n";
    for (int i = 0; i <= last.m; ++i) {
      for (int y = 0; y < last.j; ++y) {
        const double q = emp[static_cast<std::size_t>(i) * last.j + y];
        const double p = last.at(i, y);
        const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / n);
        max_z = std::max(max_z, std::abs(q - p) / se);
        body << i << ',' << y << ',' << io::format_double(p) << ',' << io::format_double(q) << ','
             << io::format_double(se) << '\n';
      }
    }
    io::write_text(out / "ctmc_vs_fp.csv", body.str());
    res.artifacts.push_back("ctmc_vs_fp.csv");
    payload["ctmc_paths"] = cfg.discrete.ctmc_paths;
    payload["max_abs_z"] = max_z;
    res.summary += ", CTMC max |z| = " + fixed(max_z, 3);
  }
  io::write_json(out / "fp_summary.json", payload);
  res.artifacts.push_back("fp_summary.json");
  res.meta["payload"] = payload;
  return res;
}

CommandResult cmd_bench(const ExperimentConfig& cfg, const fs::path& out, int) {
  CommandResult res;
  const SystemSetup setup = build_setup(cfg);
  std::vector<BenchRow> rows;
  for (std::size_t n : cfg.experiment.bench_n) {
    BenchRow row;
    row.n = n;
    row.naive_seconds =
        time_system(setup, n, Algorithm::naive, cfg.engine.seed, cfg.experiment.bench_repeats);
    row.improved_seconds =
        time_system(setup, n, Algorithm::improved, cfg.engine.seed, cfg.experiment.bench_repeats);
    rows.push_back(row);
  }
  std::ostringstream csv;
  csv << "N,naive_seconds,improved_seconds,ratio\n";
  json jrows = json::array();
  std::vector<double> ns, tn, ti;
  for (const auto& r : rows) {
    const double ratio = r.naive_seconds / r.improved_seconds;
    csv << r.n << ',' << io::format_double(r.naive_seconds) << ','
        << io::format_double(r.improved_seconds) << ',' << io::format_double(ratio) << '\n';
    jrows.push_back({{"n", r.n},
                     {"naive_seconds", r.naive_seconds},
                     {"improved_seconds", r.improved_seconds},
                     {"ratio", ratio}});
    ns.push_back(static_cast<double>(r.n));
    tn.push_back(r.naive_seconds);
    ti.push_back(r.improved_seconds);
  }
  io::write_text(out / "bench.csv", csv.str());
  json payload = {{"rows", jrows}};
  const auto& last = rows.back();
  res.summary = "bench: N = " + std::to_string(last.n) + ", naive " +
                fixed(last.naive_seconds, 3) + " s, improved " + fixed(last.improved_seconds, 3) +
                " s, ratio " + fixed(last.naive_seconds / last.improved_seconds, 1);
  if (rows.size() >= 2) {
    const auto fn = fit_power_law(ns, tn);
    const auto fi = fit_power_law(ns, ti);
    payload["naive_exponent"] = fn.exponent;
    payload["improved_exponent"] = fi.exponent;
    res.summary += ", exponents naive " + fixed(fn.exponent, 2) + " improved " +
                   fixed(fi.exponent, 2);
  }
  io::write_json(out / "bench.json", payload);
  res.artifacts = {"bench.csv", "bench.json"};
  res.meta["payload"] = payload;
  return res;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate",    "marginals",     "asian", "tau-cdf",
                                              "convergence", "fokker-planck", "bench"};
  return names;
}

const char* version_string() { return SLI_GIT_DESCRIBE; }

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_power_law: need two samples of equal size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw std::invalid_argument("fit_power_law: values must be > 0");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[k]) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_power_law: all x identical");
  PowerLawFit f;
  f.exponent = sxy / sxx;
  f.log_prefactor = my - f.exponent * mx;
  return f;
}

double time_system(const SystemSetup& setup, std::size_t n, Algorithm algorithm,
                   std::uint64_t seed, std::size_t repeats) {
  EngineOptions opt = setup.options;
  opt.n = n;
  opt.algorithm = algorithm;
  opt.aggregate_mode = AggregateMode::incremental;
  double best = 0.0;
  for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
    const auto start = Clock::now();
    ParticleSystem sys(setup.model, setup.dynamics, opt, seed);
    sys.run();
    const double s = seconds_since(start);
    if (r == 0 || s < best) best = s;
  }
  return best;
}

CommandResult dispatch(const std::string& command, const ExperimentConfig& cfg,
                       const fs::path& out, int threads) {
  const auto start = Clock::now();
  fs::create_directories(out);
  CommandResult res;
  if (command == "simulate") {
    res = cmd_simulate(cfg, out, threads);
  } else if (command == "marginals") {
    res = cmd_marginals(cfg, out, threads);
  } else if (command == "asian") {
    res = cmd_asian(cfg, out, threads);
  } else if (command == "tau-cdf") {
    res = cmd_tau_cdf(cfg, out, threads);
  } else if (command == "convergence") {
    res = cmd_convergence(cfg, out, threads);
  } else if (command == "fokker-planck") {
    res = cmd_fokker_planck(cfg, out, threads);
  } else if (command == "bench") {
    res = cmd_bench(cfg, out, threads);
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  io::write_text(out / "config.ini", serialize_config(cfg));
  res.artifacts.push_back("config.ini");
  res.meta["command"] = command;
  res.meta["config_hash"] = config_hash(cfg);
  res.meta["version"] = version_string();
  res.meta["seed"] = cfg.engine.seed;
  res.meta["threads"] = threads > 0 ? threads : omp_get_max_threads();
  res.meta["applied_defaults"] = cfg.applied_defaults;
  res.meta["artifacts"] = res.artifacts;
  res.meta["wall_clock_seconds"] = seconds_since(start);
  res.meta["summary"] = res.summary;
  io::write_json(out / "meta.json", res.meta);
  return res;
}

}  // namespace sli
