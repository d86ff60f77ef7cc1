#include "sli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace sli {

namespace pt = boost::property_tree;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string s = "configuration error";
  if (errors.size() > 1) s += "s";
  s += ":";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  // Accept simple fractions such as 1/3.
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    double a = 0.0, b = 0.0;
    if (!parse_double(t.substr(0, slash), a) || !parse_double(t.substr(slash + 1), b) || b == 0.0) {
      return false;
    }
    out = a / b;
    return true;
  }
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size();
}

bool parse_int(const std::string& s, long long& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(t.c_str(), &end, 10);
  return errno == 0 && end == t.c_str() + t.size();
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const std::string t = trim(s);
  if (t.empty() || t.front() == '-') return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoull(t.c_str(), &end, 10);
  return errno == 0 && end == t.c_str() + t.size();
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::vector<std::string> errors;

  bool has(const std::string& path) const { return tree_.get_optional<std::string>(path).has_value(); }

  std::string raw(const std::string& path) const { return trim(tree_.get<std::string>(path)); }

  void number(const std::string& path, double& target) {
    if (!has(path)) return;
    if (!parse_double(raw(path), target)) errors.push_back(path + ": expected a number");
  }

  void integer(const std::string& path, int& target, long long min_value) {
    if (!has(path)) return;
    long long v = 0;
    if (!parse_int(raw(path), v) || v < min_value) {
      errors.push_back(path + ": expected an integer >= " + std::to_string(min_value));
      return;
    }
    target = static_cast<int>(v);
  }

  void count(const std::string& path, std::size_t& target, long long min_value = 1) {
    if (!has(path)) return;
    long long v = 0;
    if (!parse_int(raw(path), v) || v < min_value) {
      errors.push_back(path + ": expected an integer >= " + std::to_string(min_value) +
                       (min_value == 1 ? " (must be positive)" : ""));
      return;
    }
    target = static_cast<std::size_t>(v);
  }

  void seed(const std::string& path, std::uint64_t& target) {
    if (!has(path)) return;
    if (!parse_u64(raw(path), target)) errors.push_back(path + ": expected an unsigned 64-bit integer");
  }

  void flag(const std::string& path, bool& target) {
    if (!has(path)) return;
    const std::string v = raw(path);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
      target = true;
    } else if (v == "false" || v == "0" || v == "no" || v == "off") {
      target = false;
    } else {
      errors.push_back(path + ": expected true or false");
    }
  }

  void choice(const std::string& path, std::string& target, std::initializer_list<const char*> allowed) {
    if (!has(path)) return;
    const std::string v = raw(path);
    for (const char* a : allowed) {
      if (v == a) {
        target = v;
        return;
      }
    }
    std::string msg = path + ": expected one of";
    for (const char* a : allowed) msg += std::string(" ") + a;
    errors.push_back(msg);
  }

  void text(const std::string& path, std::string& target) {
    if (has(path)) target = raw(path);
  }

  void numbers(const std::string& path, std::vector<double>& target) {
    if (!has(path)) return;
    target.clear();
    for (const auto& item : split_list(raw(path))) {
      double v = 0.0;
      if (!parse_double(item, v)) {
        errors.push_back(path + ": '" + item + "' is not a number");
        return;
      }
      target.push_back(v);
    }
  }

  void counts(const std::string& path, std::vector<std::size_t>& target) {
    if (!has(path)) return;
    target.clear();
    for (const auto& item : split_list(raw(path))) {
      if (item.find(':') != std::string::npos) {
        std::vector<long long> parts;
        std::istringstream is(item);
        std::string p;
        while (std::getline(is, p, ':')) {
          long long v = 0;
          if (!parse_int(p, v)) parts.clear();
          parts.push_back(v);
        }
        if (parts.size() != 3 || parts[0] < 1 || parts[2] < 1 || parts[1] < parts[0]) {
          errors.push_back(path + ": bad range '" + item + "', expected start:stop:step");
          return;
        }
        for (long long v = parts[0]; v <= parts[1]; v += parts[2]) {
          target.push_back(static_cast<std::size_t>(v));
        }
        continue;
      }
      long long v = 0;
      if (!parse_int(item, v) || v < 1) {
        errors.push_back(path + ": '" + item + "' is not a positive integer");
        return;
      }
      target.push_back(static_cast<std::size_t>(v));
    }
  }

  void strings(const std::string& path, std::vector<std::string>& target) {
    if (has(path)) target = split_list(raw(path));
  }

 private:
  const pt::ptree& tree_;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"model", {"m", "lambda_bar", "f_low", "f_high", "horizon", "intensity", "intensity_table"}},
      {"factor",
       {"kind", "y0", "a", "sigma", "gamma", "kappa", "cir_scheme", "ou_drift", "drift_const",
        "drift_linear", "vol_const", "vol_linear", "jump_linear"}},
      {"engine", {"n", "d", "algorithm", "seed", "forced_recompute", "x0", "x_pmf", "replications"}},
      {"experiment",
       {"model", "strike", "tau_thresholds", "tau_convention", "n_values", "reps_per_n", "reference_n",
        "reference_reps", "estimators", "pmf_level", "clt_systems", "clt_particles", "bench_n",
        "bench_repeats"}},
      {"discrete", {"generator_file", "f_values", "y0", "dt", "output_every", "ctmc_paths"}},
  };
  return s;
}

void check_schema(const pt::ptree& tree, std::vector<std::string>& errors) {
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (key != "version") errors.push_back(key + ": unknown top-level key");
      continue;
    }
    const auto it = schema().find(key);
    if (it == schema().end()) {
      errors.push_back(key + ": unknown section");
      continue;
    }
    for (const auto& [sub, _] : node) {
      if (!it->second.count(sub)) errors.push_back(key + "." + sub + ": unknown key");
    }
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    if constexpr (std::is_floating_point_v<T>) {
      os << fmt(v[i]);
    } else {
      os << v[i];
    }
  }
  return os.str();
}

void semantic_checks(ExperimentConfig& cfg, std::vector<std::string>& errors) {
  const auto& fs = cfg.factor;
  if (fs.kind != "generic" && !(fs.y0 > 0.0)) errors.push_back("factor.y0: must be > 0");
  if (fs.sigma < 0.0) errors.push_back("factor.sigma: must be >= 0");
  if (fs.kappa < 0.0) errors.push_back("factor.kappa: must be >= 0");
  if (fs.a < 0.0) errors.push_back("factor.a: must be >= 0");
  if (fs.gamma < 0.0) errors.push_back("factor.gamma: must be >= 0");

  const int m = cfg.model.m;
  if (cfg.engine.x0 < 0 || cfg.engine.x0 > m) errors.push_back("engine.x0: outside {0..m}");
  if (!cfg.engine.x_pmf.empty()) {
    if (cfg.engine.x_pmf.size() != static_cast<std::size_t>(m) + 1) {
      errors.push_back("engine.x_pmf: needs m + 1 entries");
    }
    for (double p : cfg.engine.x_pmf) {
      if (p < 0.0) errors.push_back("engine.x_pmf: negative entry");
    }
  }
  const auto& ex = cfg.experiment;
  for (std::size_t k = 1; k < ex.n_values.size(); ++k) {
    if (ex.n_values[k] <= ex.n_values[k - 1]) {
      errors.push_back("experiment.n_values: must be strictly increasing");
      break;
    }
  }
  if (ex.reps_per_n < 2) errors.push_back("experiment.reps_per_n: must be >= 2");
  for (const auto& e : ex.estimators) {
    if (e != "asian" && e != "tau" && e != "pmf-point") {
      errors.push_back("experiment.estimators: unknown estimator '" + e + "'");
    }
  }
  for (double th : ex.tau_thresholds) {
    if (th < 0.0) errors.push_back("experiment.tau_thresholds: must be >= 0");
  }
  if (!(cfg.discrete.dt > 0.0)) errors.push_back("discrete.dt: must be > 0");

  if (!errors.empty()) return;
  try {
    const LocalIntensity li = build_intensity(cfg);
    const auto report = validate_params(cfg.model, li);
    for (const auto& f : report.failures) errors.push_back("model: violates " + f);
  } catch (const std::exception& e) {
    errors.push_back(std::string("model.intensity: ") + e.what());
  }
}

ExperimentConfig from_tree(const pt::ptree& tree, const std::filesystem::path& base_dir) {
  std::vector<std::string> errors;
  check_schema(tree, errors);

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  Reader r(tree);
  r.integer("version", cfg.version, 1);
  if (cfg.version != kConfigVersion) {
    r.errors.push_back("version: unsupported config version " + std::to_string(cfg.version));
  }

  r.integer("model.m", cfg.model.m, 1);
  r.number("model.lambda_bar", cfg.model.lambda_bar);
  r.number("model.horizon", cfg.model.horizon);
  if (r.has("model.f_low")) {
    r.number("model.f_low", cfg.model.f_low);
  } else {
    cfg.model.f_low = 1.0 / 3.0;
    cfg.applied_defaults.push_back("model.f_low = " + fmt(cfg.model.f_low));
  }
  if (r.has("model.f_high")) {
    r.number("model.f_high", cfg.model.f_high);
  } else {
    cfg.model.f_high = 3.0;
    cfg.applied_defaults.push_back("model.f_high = " + fmt(cfg.model.f_high));
  }
  r.choice("model.intensity", cfg.intensity.kind, {"linear-decay", "table", "zero"});
  r.text("model.intensity_table", cfg.intensity.table_path);

  r.choice("factor.kind", cfg.factor.kind, {"lognormal", "cir", "generic"});
  r.number("factor.y0", cfg.factor.y0);
  r.number("factor.a", cfg.factor.a);
  r.number("factor.sigma", cfg.factor.sigma);
  r.number("factor.gamma", cfg.factor.gamma);
  r.number("factor.kappa", cfg.factor.kappa);
  r.choice("factor.cir_scheme", cfg.factor.cir_scheme, {"second-order", "exact"});
  r.choice("factor.ou_drift", cfg.factor.ou_drift, {"ito", "plus-half"});
  r.number("factor.drift_const", cfg.factor.drift_const);
  r.number("factor.drift_linear", cfg.factor.drift_linear);
  r.number("factor.vol_const", cfg.factor.vol_const);
  r.number("factor.vol_linear", cfg.factor.vol_linear);
  r.number("factor.jump_linear", cfg.factor.jump_linear);

  r.count("engine.n", cfg.engine.n);
  r.count("engine.d", cfg.engine.d);
  r.choice("engine.algorithm", cfg.engine.algorithm, {"improved", "naive"});
  r.seed("engine.seed", cfg.engine.seed);
  r.flag("engine.forced_recompute", cfg.engine.forced_recompute);
  r.integer("engine.x0", cfg.engine.x0, 0);
  r.numbers("engine.x_pmf", cfg.engine.x_pmf);
  r.count("engine.replications", cfg.engine.replications);

  r.choice("experiment.model", cfg.experiment.model, {"sli", "li"});
  r.number("experiment.strike", cfg.experiment.strike);
  r.numbers("experiment.tau_thresholds", cfg.experiment.tau_thresholds);
  r.choice("experiment.tau_convention", cfg.experiment.tau_convention,
           {"closed", "skip-first", "skip-last"});
  r.counts("experiment.n_values", cfg.experiment.n_values);
  r.count("experiment.reps_per_n", cfg.experiment.reps_per_n);
  r.count("experiment.reference_n", cfg.experiment.reference_n);
  r.count("experiment.reference_reps", cfg.experiment.reference_reps);
  r.strings("experiment.estimators", cfg.experiment.estimators);
  r.integer("experiment.pmf_level", cfg.experiment.pmf_level, 0);
  r.count("experiment.clt_systems", cfg.experiment.clt_systems, 0);
  r.count("experiment.clt_particles", cfg.experiment.clt_particles);
  r.counts("experiment.bench_n", cfg.experiment.bench_n);
  r.count("experiment.bench_repeats", cfg.experiment.bench_repeats);

  r.text("discrete.generator_file", cfg.discrete.generator_file);
  r.numbers("discrete.f_values", cfg.discrete.f_values);
  r.integer("discrete.y0", cfg.discrete.y0, 0);
  r.number("discrete.dt", cfg.discrete.dt);
  r.count("discrete.output_every", cfg.discrete.output_every);
  r.count("discrete.ctmc_paths", cfg.discrete.ctmc_paths, 0);

  errors.insert(errors.end(), r.errors.begin(), r.errors.end());
  if (errors.empty()) semantic_checks(cfg, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::filesystem::path resolve(const ExperimentConfig& cfg, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !cfg.base_dir.empty()) return cfg.base_dir / path;
  return path;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

ExperimentConfig parse_config_string(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"syntax: line " + std::to_string(e.line()) + ": " + e.message()});
  }
  return from_tree(tree, base_dir);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), path.parent_path());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "version = " << cfg.version << "\n\n";
  os << "[model]\n"
     << "m = " << cfg.model.m << "\n"
     << "lambda_bar = " << fmt(cfg.model.lambda_bar) << "\n"
     << "f_low = " << fmt(cfg.model.f_low) << "\n"
     << "f_high = " << fmt(cfg.model.f_high) << "\n"
     << "horizon = " << fmt(cfg.model.horizon) << "\n"
     << "intensity = " << cfg.intensity.kind << "\n"
     << "intensity_table = " << cfg.intensity.table_path << "\n\n";
  const auto& f = cfg.factor;
  os << "[factor]\n"
     << "kind = " << f.kind << "\n"
     << "y0 = " << fmt(f.y0) << "\n"
     << "a = " << fmt(f.a) << "\n"
     << "sigma = " << fmt(f.sigma) << "\n"
     << "gamma = " << fmt(f.gamma) << "\n"
     << "kappa = " << fmt(f.kappa) << "\n"
     << "cir_scheme = " << f.cir_scheme << "\n"
     << "ou_drift = " << f.ou_drift << "\n"
     << "drift_const = " << fmt(f.drift_const) << "\n"
     << "drift_linear = " << fmt(f.drift_linear) << "\n"
     << "vol_const = " << fmt(f.vol_const) << "\n"
     << "vol_linear = " << fmt(f.vol_linear) << "\n"
     << "jump_linear = " << fmt(f.jump_linear) << "\n\n";
  const auto& e = cfg.engine;
  os << "[engine]\n"
     << "n = " << e.n << "\n"
     << "d = " << e.d << "\n"
     << "algorithm = " << e.algorithm << "\n"
     << "seed = " << e.seed << "\n"
     << "forced_recompute = " << (e.forced_recompute ? "true" : "false") << "\n"
     << "x0 = " << e.x0 << "\n"
     << "x_pmf = " << join(e.x_pmf) << "\n"
     << "replications = " << e.replications << "\n\n";
  const auto& x = cfg.experiment;
  os << "[experiment]\n"
     << "model = " << x.model << "\n"
     << "strike = " << fmt(x.strike) << "\n"
     << "tau_thresholds = " << join(x.tau_thresholds) << "\n"
     << "tau_convention = " << x.tau_convention << "\n"
     << "n_values = " << join(x.n_values) << "\n"
     << "reps_per_n = " << x.reps_per_n << "\n"
     << "reference_n = " << x.reference_n << "\n"
     << "reference_reps = " << x.reference_reps << "\n"
     << "estimators = " << join(x.estimators) << "\n"
     << "pmf_level = " << x.pmf_level << "\n"
     << "clt_systems = " << x.clt_systems << "\n"
     << "clt_particles = " << x.clt_particles << "\n"
     << "bench_n = " << join(x.bench_n) << "\n"
     << "bench_repeats = " << x.bench_repeats << "\n\n";
  const auto& d = cfg.discrete;
  os << "[discrete]\n"
     << "generator_file = " << d.generator_file << "\n"
     << "f_values = " << join(d.f_values) << "\n"
     << "y0 = " << d.y0 << "\n"
     << "dt = " << fmt(d.dt) << "\n"
     << "output_every = " << d.output_every << "\n"
     << "ctmc_paths = " << d.ctmc_paths << "\n";
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LocalIntensity load_intensity_table(const std::filesystem::path& path, int m, double horizon) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open intensity table '" + path.string() + "'");
  std::vector<std::vector<IntensityPiece>> pieces(static_cast<std::size_t>(m) + 1);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (lineno == 1 && line.rfind("level", 0) == 0) continue;
    const auto cols = split_list(line);
    long long level = 0;
    double start = 0.0, value = 0.0;
    if (cols.size() != 3 || !parse_int(cols[0], level) || !parse_double(cols[1], start) ||
        !parse_double(cols[2], value) || level < 0 || level > m) {
      throw DomainError("intensity table line " + std::to_string(lineno) +
                        ": expected level,start,value with level in {0..m}");
    }
    pieces[static_cast<std::size_t>(level)].push_back({start, value});
  }
  for (auto& lv : pieces) {
    std::sort(lv.begin(), lv.end(),
              [](const IntensityPiece& a, const IntensityPiece& b) { return a.start < b.start; });
  }
  return LocalIntensity::table(std::move(pieces), horizon);
}

LocalIntensity build_intensity(const ExperimentConfig& cfg) {
  const auto& p = cfg.model;
  if (cfg.intensity.kind == "linear-decay") {
    return LocalIntensity::linear_decay(p.lambda_bar, p.m, p.horizon);
  }
  if (cfg.intensity.kind == "zero") return LocalIntensity::zero(p.m, p.horizon);
  if (cfg.intensity.table_path.empty()) {
    throw DomainError("intensity = table requires model.intensity_table");
  }
  return load_intensity_table(resolve(cfg, cfg.intensity.table_path), p.m, p.horizon);
}

Model build_model(const ExperimentConfig& cfg) {
  Model model{cfg.model, build_intensity(cfg), ClampF{cfg.model.f_low, cfg.model.f_high}};
  require_valid(model.params, model.intensity);
  return model;
}

FactorDynamics build_dynamics(const FactorSpec& s) {
  if (s.kind == "cir") {
    return CirDynamics{s.kappa, s.sigma, s.y0,
                       s.cir_scheme == "exact" ? CirScheme::exact : CirScheme::second_order};
  }
  if (s.kind == "lognormal") {
    return LogNormalDynamics{s.a, s.sigma, s.gamma, s.y0,
                             s.ou_drift == "plus-half" ? OuDrift::plus_half : OuDrift::ito};
  }
  GenericDynamics g;
  const double b0 = s.drift_const, b1 = s.drift_linear;
  const double v0 = s.vol_const, v1 = s.vol_linear, j1 = s.jump_linear;
  g.drift = [b0, b1](double, int, double y) { return b0 + b1 * y; };
  g.vol = [v0, v1](double, int, double y) { return v0 + v1 * y; };
  g.jump = [j1](double, int, double y) { return j1 * y; };
  g.y0 = s.y0;
  return g;
}

EngineOptions build_engine_options(const ExperimentConfig& cfg) {
  EngineOptions o;
  o.n = cfg.engine.n;
  o.d = cfg.engine.d;
  o.algorithm = cfg.engine.algorithm == "naive" ? Algorithm::naive : Algorithm::improved;
  o.aggregate_mode =
      cfg.engine.forced_recompute ? AggregateMode::forced_recompute : AggregateMode::incremental;
  o.initial.x0 = cfg.engine.x0;
  o.initial.x_pmf = cfg.engine.x_pmf;
  return o;
}

SystemSetup build_setup(const ExperimentConfig& cfg) {
  return SystemSetup{build_model(cfg), build_dynamics(cfg.factor), build_engine_options(cfg)};
}

std::vector<EstimatorSpec> build_estimators(const ExperimentConfig& cfg) {
  std::vector<EstimatorSpec> out;
  for (const auto& e : cfg.experiment.estimators) {
    EstimatorSpec s;
    s.kind = e == "tau" ? EstimatorKind::tau
                        : (e == "pmf-point" ? EstimatorKind::pmf_point : EstimatorKind::asian);
    s.level = cfg.experiment.pmf_level;
    s.strike = cfg.experiment.strike;
    out.push_back(s);
  }
  return out;
}

std::vector<double> tau_thresholds(const ExperimentConfig& cfg) {
  if (!cfg.experiment.tau_thresholds.empty()) return cfg.experiment.tau_thresholds;
  return {cfg.model.horizon / 4.0, cfg.model.horizon / 8.0};
}

GapConvention gap_convention(const ExperimentConfig& cfg) {
  if (cfg.experiment.tau_convention == "skip-first") return GapConvention::skip_first;
  if (cfg.experiment.tau_convention == "skip-last") return GapConvention::skip_last;
  return GapConvention::closed;
}

}  // namespace sli
