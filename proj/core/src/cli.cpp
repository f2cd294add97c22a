#include "weyllab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "weyllab/concurrency.hpp"
#include "weyllab/experiments.hpp"
#include "weyllab/numerics.hpp"

namespace weyllab::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kKnownKeys = {
    "experiment",     "potential",        "potential.dim", "potential.kappa",
    "potential.theta", "potential.kappa1", "potential.kappa2",
    "grid.L",         "grid.N",           "grid.dim",      "hbar",
    "hbar_list",      "t_grid",           "lam_grid",      "interval.a",
    "interval.b",     "beta",             "alpha",         "mu_exponent",
    "mc.samples",     "mc.seed",          "threads",       "strict",
    "output_dir",     "k",                "K",             "t_probe",
    "source",         "slope_lo",         "slope_hi",      "tol",
    "premise_tol",    "conclusion_tol",   "ppd"};

void check_key(const std::string& key) {
  if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
    throw ConfigError("unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config JSON failed to parse");
    for (const auto& [key, value] : j.items()) {
      check_key(key);
      if (key == "experiment")
        cfg.experiment = value.get<std::string>();
      else if (value.is_string())
        cfg.kv[key] = value.get<std::string>();
      else
        cfg.kv[key] = value.dump();
    }
    return cfg;
  }
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line without '=': '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    check_key(key);
    if (key == "experiment")
      cfg.experiment = value;
    else
      cfg.kv[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: '" + it->second + "'");
  }
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer: '" + it->second + "'");
  }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: '" + it->second + "'");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: '" + it->second + "'");
}

std::vector<double> RunConfig::get_grid(const std::string& key,
                                        std::vector<double> fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string& spec = it->second;
  std::vector<double> grid;
  try {
    if (spec.rfind("geom:", 0) == 0) {
      std::istringstream in(spec.substr(5));
      std::string lo, hi, count;
      if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') || !std::getline(in, count))
        throw ConfigError("grid shorthand must be geom:lo:hi:count");
      const double a = std::stod(lo), b = std::stod(hi);
      const int n = std::stoi(count);
      if (n < 2 || !(a > 0.0) || !(b > a))
        throw ConfigError("config key '" + key + "': geom grid needs 0 < lo < hi, count >= 2");
      for (int i = 0; i < n; ++i) grid.push_back(a * std::pow(b / a, double(i) / (n - 1)));
      return grid;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) grid.push_back(std::stod(trim(item)));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a grid: '" + spec + "'");
  }
  if (grid.empty()) throw ConfigError("config key '" + key + "' gives an empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()) &&
      !std::is_sorted(grid.rbegin(), grid.rend()))
    throw ConfigError("config key '" + key + "' must be sorted");
  return grid;
}

void RunConfig::validate() const {
  static const std::vector<std::string> experiments = {
      "weyl-classical", "weyl-semiclassical", "heat-trace",      "tauberian",
      "tauberian-semi", "oscillation-scan",   "sigma-scan",      "nonregular-demo"};
  if (std::find(experiments.begin(), experiments.end(), experiment) == experiments.end())
    throw ConfigError("unknown experiment '" + experiment + "'");
  // partial grid specifications are the classic silent failure; insist on both
  if ((has("grid.L") || has("grid.dim")) && !has("grid.N"))
    throw ConfigError("grid.N is required when grid.* keys are given");
  if (has("grid.N") && !has("grid.L"))
    throw ConfigError("grid.L is required when grid.* keys are given");
}

const std::vector<ExperimentInfo>& experiment_list() {
  static const std::vector<ExperimentInfo> list = {
      {"weyl-classical", "N(lambda) ~ (2pi)^-n omega_n int (lambda-V)_+^{n/2} dx"},
      {"weyl-semiclassical", "hbar^n N_hbar(I) ~ (2pi)^-n |{ |xi|^2 + V in I }|"},
      {"heat-trace", "Tr e^{-t(hbar^2 Delta+V)} ~ (4 pi t hbar^2)^{-n/2} int e^{-tV} dx"},
      {"tauberian", "Laplace equivalence of two measures transfers to cumulative masses"},
      {"tauberian-semi", "hbar^{2a} mu_hbar(I) converges to the fractional average of nu on I"},
      {"oscillation-scan", "growth/decay of the beta-oscillation quotient over lambda"},
      {"sigma-scan", "log-log slope of the sublevel volume sigma(lambda)"},
      {"nonregular-demo", "doubling staircase measure with non-regularly-varying Laplace transform"},
  };
  return list;
}

namespace {

Potential potential_from_config(const RunConfig& cfg) {
  const std::string name = cfg.get_string("potential", "power");
  if (name == "power") {
    return make_power(cfg.get_int("potential.dim", 1), cfg.get_double("potential.kappa", 2.0));
  }
  if (name == "abs") {
    return make_power(cfg.get_int("potential.dim", 1), 1.0);
  }
  if (name == "rozenbljum") {
    return make_rozenbljum(cfg.get_double("potential.theta", 0.3),
                           cfg.get_double("potential.kappa1", 0.5),
                           cfg.get_double("potential.kappa2", 0.1),
                           cfg.get_int("potential.dim", 2));
  }
  if (name == "exp") {
    Potential V;
    V.dim = 1;
    V.evaluator = [](std::span<const double> x) { return std::exp(std::fabs(x[0])); };
    V.growth_envelope = [](double rho) { return std::exp(rho); };
    V.analytic_sigma = [](double lam) { return lam < 1.0 ? 0.0 : 2.0 * std::log(lam); };
    V.label = "exp(|x|)";
    return V;
  }
  throw ConfigError("unknown potential '" + name + "'");
}

MonteCarloConfig mc_from_config(const RunConfig& cfg) {
  MonteCarloConfig mc;
  mc.samples = static_cast<std::size_t>(cfg.get_u64("mc.samples", 100000));
  mc.seed = cfg.get_u64("mc.seed", 20250801ull);
  if (mc.samples == 0) throw ConfigError("mc.samples must be positive");
  return mc;
}

GridSpec grid_from_config(const RunConfig& cfg, const GridSpec& fallback) {
  GridSpec g = fallback;
  g.half_width = cfg.get_double("grid.L", fallback.half_width);
  g.points_per_axis = cfg.get_int("grid.N", fallback.points_per_axis);
  g.dim = cfg.get_int("grid.dim", fallback.dim);
  return g;
}

// Phase-space estimate of how many eigenvalues sit below lam, padded for the
// trust margin; clamped to the solver precondition k <= dim/4.
int estimate_k(const DiscreteHamiltonian& H, double lam) {
  const int n = H.grid.dim;
  double acc = 0.0;
  for (const double v : H.potential_on_grid) acc += std::pow(positive_part(1.15 * lam - v), 0.5 * n);
  const double count = std::pow(2.0 * kPi * H.hbar, -n) * unit_ball_volume(n) *
                       std::pow(H.grid.spacing(), n) * acc;
  const int k = static_cast<int>(1.3 * count) + 16;
  return static_cast<int>(std::min<std::int64_t>(k, H.dimension() / 4));
}

void surface_adequacy(const RunConfig& cfg, const DiscreteHamiltonian& H, double lam_target) {
  const AdequacyReport rep = adequacy_check(H, lam_target);
  if (rep.pass) return;
  std::ostringstream msg;
  msg << "grid inadequate for lambda = " << lam_target << ": boundary min V = "
      << rep.boundary_min_V << " (need >= " << rep.boundary_required
      << "), h^2 lambda = " << rep.resolution_value << " (need <= " << rep.resolution_limit << ")";
  if (cfg.get_bool("strict", false)) throw ConfigError(msg.str());
  std::cerr << "[weyl-lab] warning: " << msg.str() << "\n";
}

struct Outputs {
  fs::path dir;
  bool all_pass = true;

  explicit Outputs(const RunConfig& cfg) : dir(cfg.get_string("output_dir", ".")) {
    fs::create_directories(dir);
  }

  void emit(const AsymptoticReport& report) {
    std::ofstream csv(dir / (report.experiment_id + ".csv"));
    write_report_csv(csv, report);
    std::ofstream vj(dir / (report.experiment_id + ".verdict.json"));
    vj << verdict_json(report);
    std::cout << "[weyl-lab] " << report.experiment_id
              << (report.verdict.pass ? ": pass" : ": FAIL")
              << " (final ratio " << report.verdict.final_ratio << ")\n";
    all_pass = all_pass && report.verdict.pass;
  }

  void emit(const ScanReport& report) {
    std::ofstream csv(dir / (report.experiment_id + ".csv"));
    write_scan_csv(csv, report);
    std::ofstream vj(dir / (report.experiment_id + ".verdict.json"));
    vj << scan_verdict_json(report);
    std::cout << "[weyl-lab] " << report.experiment_id
              << (report.pass ? ": pass" : ": FAIL") << " (slope " << report.slope << ")\n";
    all_pass = all_pass && report.pass;
  }

  void emit_measure(const std::string& name, const StieltjesMeasure& m) {
    std::ofstream out(dir / name);
    write_measure(out, m);
  }
};

int run_weyl_classical(const RunConfig& cfg) {
  const Potential V = potential_from_config(cfg);
  const GridSpec grid = grid_from_config(cfg, {1, 16.0, 3200});
  const double hbar = cfg.get_double("hbar", 1.0);
  const auto lam_grid = cfg.get_grid("lam_grid", {20.0, 40.0, 60.0});
  const double lam_max = *std::max_element(lam_grid.begin(), lam_grid.end());

  const DiscreteHamiltonian H = build(V, grid, hbar);
  surface_adequacy(cfg, H, lam_max);
  const int k = cfg.get_int("k", estimate_k(H, lam_max));
  const Spectrum s = eigen_lowest(H, k);

  Outputs out(cfg);
  out.emit(classical_weyl_report(V, s, lam_grid, cfg.get_double("tol", 0.05)));
  return out.all_pass ? 0 : 2;
}

int run_weyl_semiclassical(const RunConfig& cfg) {
  const Potential V = potential_from_config(cfg);
  const GridSpec grid = grid_from_config(cfg, {1, 3.0, 800});
  const auto hbars = cfg.get_grid("hbar_list", {0.2, 0.1, 0.05});
  const double a = cfg.get_double("interval.a", 1.0);
  const double b = cfg.get_double("interval.b", 2.0);
  if (!(a < b)) throw ConfigError("interval.a must be below interval.b");

  std::vector<Spectrum> spectra;
  for (const double hbar : hbars) {
    const DiscreteHamiltonian H = build(V, grid, hbar);
    surface_adequacy(cfg, H, b);
    spectra.push_back(eigen_lowest(H, cfg.get_int("k", estimate_k(H, b))));
  }
  Outputs out(cfg);
  out.emit(semiclassical_weyl_report(V, a, b, spectra, cfg.get_double("tol", 0.10)));
  return out.all_pass ? 0 : 2;
}

int run_heat_trace(const RunConfig& cfg) {
  const Potential V = potential_from_config(cfg);
  Outputs out(cfg);
  if (cfg.has("hbar_list")) {
    // semiclassical mode: fixed t, hbar sweeps down
    const GridSpec grid = grid_from_config(cfg, {1, 6.0, 1200});
    const double t = cfg.get_double("t_probe", 1.0);
    std::vector<Spectrum> spectra;
    for (const double hbar : cfg.get_grid("hbar_list", {})) {
      const DiscreteHamiltonian H = build(V, grid, hbar);
      const double lam_target = 8.0 / t * std::max(hbar, 0.05);
      surface_adequacy(cfg, H, lam_target);
      spectra.push_back(eigen_lowest(H, cfg.get_int("k", estimate_k(H, lam_target))));
    }
    out.emit(heat_trace_report_semiclassical(V, spectra, t, cfg.get_double("tol", 0.05)));
    return out.all_pass ? 0 : 2;
  }
  const GridSpec grid = grid_from_config(cfg, {1, 25.0, 4000});
  const double hbar = cfg.get_double("hbar", 1.0);
  const auto t_grid = cfg.get_grid("t_grid", {0.2, 0.1, 0.05});
  const double t_min = *std::min_element(t_grid.begin(), t_grid.end());
  const double lam_target = 7.0 / t_min;

  const DiscreteHamiltonian H = build(V, grid, hbar);
  surface_adequacy(cfg, H, lam_target);
  const Spectrum s = eigen_lowest(H, cfg.get_int("k", estimate_k(H, lam_target)));
  out.emit(heat_trace_report(V, s, t_grid, cfg.get_double("tol", 1e-3)));
  return out.all_pass ? 0 : 2;
}

int run_tauberian(const RunConfig& cfg) {
  Outputs out(cfg);
  const double alpha = cfg.get_double("alpha", 0.5);
  const std::string source = cfg.get_string("source", "staircase");
  if (source == "staircase") {
    const int K = cfg.get_int("K", 24);
    const StieltjesMeasure nu = staircase_nu(K);
    const double s_max = std::ldexp(1.0, std::min(K - 2, 22));
    const StieltjesMeasure mu = fractional_measure(nu, FractionalIndex(alpha), 0.25, 4.0 * s_max,
                                                   cfg.get_int("ppd", 128));
    std::vector<double> t_grid;
    for (int k = 4; k <= 16; ++k) t_grid.push_back(std::ldexp(1.0, -k));
    const auto ts = cfg.get_grid("t_grid", t_grid);
    const auto lams = cfg.get_grid("lam_grid", {std::ldexp(1.0, 12), std::ldexp(1.0, 16), s_max});
    auto [premise, conclusion] =
        tauberian_classical(mu, nu, FractionalIndex(alpha), ts, lams,
                            cfg.get_double("premise_tol", 1e-3),
                            cfg.get_double("conclusion_tol", 0.02));
    out.emit_measure("tauberian.nu.measure", nu);
    out.emit_measure("tauberian.mu.measure", mu);
    out.emit(premise);
    out.emit(conclusion);
    return out.all_pass ? 0 : 2;
  }
  if (source == "harmonic") {
    const Potential V = make_power(1, 2.0);
    const GridSpec grid = grid_from_config(cfg, {1, 16.0, 3200});
    const auto lams = cfg.get_grid("lam_grid", {20.0, 40.0, 60.0, 80.0});
    const double lam_max = *std::max_element(lams.begin(), lams.end());
    const DiscreteHamiltonian H = build(V, grid, cfg.get_double("hbar", 1.0));
    surface_adequacy(cfg, H, lam_max);
    const Spectrum s = eigen_lowest(H, cfg.get_int("k", estimate_k(H, lam_max)));
    const StieltjesMeasure mu = spectrum_measure(s);
    const auto sigma_grid = geometric_grid(0.05, 40.0 / 0.05, 64);
    const StieltjesMeasure nu = weyl_normalized_sigma(V, sigma_grid);
    const auto ts = cfg.get_grid("t_grid", {0.4, 0.2, 0.1, 0.05});
    auto [premise, conclusion] =
        tauberian_classical(mu, nu, FractionalIndex(alpha), ts, lams,
                            cfg.get_double("premise_tol", 0.02),
                            cfg.get_double("conclusion_tol", 0.05));
    out.emit_measure("tauberian.nu.measure", nu);
    out.emit(premise);
    out.emit(conclusion);
    return out.all_pass ? 0 : 2;
  }
  throw ConfigError("tauberian source must be 'staircase' or 'harmonic'");
}

int run_tauberian_semi(const RunConfig& cfg) {
  Outputs out(cfg);
  const double a = cfg.get_double("interval.a", 1.0);
  const double b = cfg.get_double("interval.b", 2.0);
  const double alpha = cfg.get_double("alpha", 0.5);
  const double t_probe = cfg.get_double("t_probe", 1.0);
  const Potential V = make_power(1, 2.0);
  const auto hbars = cfg.get_grid("hbar_list", {0.2, 0.1, 0.05, 0.01});

  std::vector<std::pair<double, StieltjesMeasure>> family;
  const std::string source = cfg.get_string("source", "model");
  for (const double hbar : hbars) {
    if (source == "model") {
      // exact spectrum of hbar^2 Delta + x^2: hbar (2k+1)
      std::vector<double> vals;
      const double top = 60.0 * std::max(b, 1.0);
      for (double lam = hbar; lam < top; lam += 2.0 * hbar) vals.push_back(lam);
      family.emplace_back(hbar, spectrum_measure(spectrum_from_values(vals, hbar, top)));
    } else if (source == "discrete") {
      const GridSpec grid = grid_from_config(cfg, {1, 3.0, 800});
      const DiscreteHamiltonian H = build(V, grid, hbar);
      surface_adequacy(cfg, H, b);
      family.emplace_back(hbar,
                          spectrum_measure(eigen_lowest(H, cfg.get_int("k", estimate_k(H, b)))));
    } else {
      throw ConfigError("tauberian-semi source must be 'model' or 'discrete'");
    }
  }
  const auto sigma_grid = geometric_grid(1e-4, 80.0 / t_probe * 16.0, 64);
  const StieltjesMeasure nu = weyl_normalized_sigma(V, sigma_grid);
  out.emit(tauberian_semiclassical(family, nu, FractionalIndex(alpha), t_probe, a, b,
                                   cfg.get_double("tol", 0.10)));
  return out.all_pass ? 0 : 2;
}

int run_oscillation_scan(const RunConfig& cfg) {
  Outputs out(cfg);
  const RunConfig* c = &cfg;
  RunConfig with_default = cfg;
  if (!cfg.has("potential")) {
    with_default.set("potential", "rozenbljum");
    c = &with_default;
  }
  const Potential V = potential_from_config(*c);
  const auto lam_grid = cfg.get_grid("lam_grid", geometric_grid(1e2, 1e4, 4));
  out.emit(oscillation_scan(V, lam_grid, cfg.get_double("beta", 0.25),
                            cfg.get_double("mu_exponent", 1.0 / 6.0),
                            cfg.get_double("slope_lo", -1e9), cfg.get_double("slope_hi", 1e9),
                            mc_from_config(cfg), cfg.get_int("threads", 0)));
  return out.all_pass ? 0 : 2;
}

int run_sigma_scan(const RunConfig& cfg) {
  Outputs out(cfg);
  const RunConfig* c = &cfg;
  RunConfig with_default = cfg;
  if (!cfg.has("potential")) {
    with_default.set("potential", "rozenbljum");
    c = &with_default;
  }
  const Potential V = potential_from_config(*c);
  const auto lam_grid = cfg.get_grid("lam_grid", geometric_grid(1e2, 1e4, 9));
  out.emit(sigma_scan(V, lam_grid, cfg.get_double("slope_lo", -1e9),
                      cfg.get_double("slope_hi", 1e9), mc_from_config(cfg),
                      cfg.get_int("threads", 0)));
  return out.all_pass ? 0 : 2;
}

int run_nonregular_demo(const RunConfig& cfg) {
  Outputs out(cfg);
  out.emit(nonregular_demo(cfg.get_int("K", 24)));
  return out.all_pass ? 0 : 2;
}

}  // namespace

int run(const RunConfig& config) {
  config.validate();
  if (config.has("threads")) {
    // route through the env fallback so nested helpers see the cap too
    setenv("WEYL_LAB_THREADS", config.get_string("threads", "").c_str(), 1);
  }
  const std::string& e = config.experiment;
  if (e == "weyl-classical") return run_weyl_classical(config);
  if (e == "weyl-semiclassical") return run_weyl_semiclassical(config);
  if (e == "heat-trace") return run_heat_trace(config);
  if (e == "tauberian") return run_tauberian(config);
  if (e == "tauberian-semi") return run_tauberian_semi(config);
  if (e == "oscillation-scan") return run_oscillation_scan(config);
  if (e == "sigma-scan") return run_sigma_scan(config);
  if (e == "nonregular-demo") return run_nonregular_demo(config);
  throw ConfigError("unknown experiment '" + e + "'");
}

}  // namespace weyllab::cli
