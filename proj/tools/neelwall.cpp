// Command-line entry points for the moving Neel wall toolkit.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "neel/dynamics.hpp"
#include "neel/io.hpp"
#include "neel/linops.hpp"
#include "neel/profiles.hpp"
#include "neel/region.hpp"
#include "neel/spectra.hpp"

namespace fs = std::filesystem;
using namespace neel;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Run {
  std::string command;
  Config cfg;
  fs::path out;
  RunManifest manifest;

  std::string get(const std::string& k) const {
    auto it = cfg.find(k);
    if (it == cfg.end()) throw ConfigError("missing setting " + k);
    return it->second;
  }
  double num(const std::string& k) const {
    std::string s = get(k);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError("setting " + k + " is not a number: '" + s + "'");
    return v;
  }
  long integer(const std::string& k) const {
    double v = num(k);
    if (v != std::floor(v)) throw ConfigError("setting " + k + " must be an integer");
    return static_cast<long>(v);
  }
  std::vector<double> list(const std::string& k) const {
    std::vector<double> out;
    std::stringstream ss(get(k));
    std::string item;
    while (std::getline(ss, item, ',')) {
      char* end = nullptr;
      double v = std::strtod(item.c_str(), &end);
      if (item.empty() || *end != '\0') throw ConfigError("bad list entry '" + item + "' in " + k);
      out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list for " + k);
    return out;
  }
  Mode mode() const {
    std::string m = get("mode");
    if (m == "nonlocal") return Mode::nonlocal;
    if (m == "local") return Mode::local;
    throw ConfigError("mode must be nonlocal or local");
  }
  Grid grid() const {
    double L = num("L");
    long n = integer("n");
    if (!(L > 0.0)) throw ConfigError("L must be positive");
    if (n < 16 || n % 2) throw ConfigError("n must be even and at least 16");
    return Grid(L, static_cast<int>(n));
  }
  unsigned long long seed() const {
    long s = integer("seed");
    if (s < 0) throw ConfigError("seed must be non-negative");
    return static_cast<unsigned long long>(s);
  }
  std::string path(const std::string& name) {
    manifest.outputs.push_back(name);
    return (out / name).string();
  }
  void periodization(const Profile& p) {
    const Grid& g = p.theta.grid;
    manifest.periodization = std::cos(evaluate(p.theta, -g.L + 0.5 * g.dx()));
  }
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

Profile static_wall(const Run& r) { return solve_static(r.grid(), r.num("tol"), r.mode()); }

Profile moving_wall(const Run& r, const Profile& stat, double H) {
  if (H == 0.0) return stat;
  TravelingOptions opt;
  opt.mode = r.mode();
  opt.tol = r.num("tol");
  return solve_traveling(stat.theta.grid, H, r.num("nu"), stat, stat, opt);
}

json profile_summary(const Profile& p) {
  json j;
  j["H"] = p.H;
  j["c"] = p.c;
  j["nu"] = p.nu;
  j["energy"] = energy(p.theta, p.mode).total;
  j["residual"] = p.residual;
  j["iterations"] = p.iterations;
  j["M"] = wall_mass(p);
  double sup = 0.0;
  for (double v : p.theta.values) sup = std::max(sup, std::abs(v));
  j["sup_distance_to_arcsin_tanh"] = sup;
  return j;
}

int cmd_solve_static(Run& r) {
  Profile p = static_wall(r);
  store_profile(r.path("profile.neelw"), p);
  write_report(profile_table(p), r.path("profile.csv"));
  json s = profile_summary(p);
  s["mode"] = r.get("mode");
  write_json(s, r.path("summary.json"));
  r.periodization(p);
  return 0;
}

int cmd_solve_moving(Run& r) {
  Profile stat = static_wall(r);
  Profile p = moving_wall(r, stat, r.num("H"));
  store_profile(r.path("profile.neelw"), p);
  write_report(profile_table(p), r.path("profile.csv"));
  write_json(profile_summary(p), r.path("summary.json"));
  r.periodization(p);
  return 0;
}

int cmd_mobility(Run& r) {
  Profile stat = static_wall(r);
  MobilityResult m = mobility(stat.theta.grid, r.num("nu"), r.list("H"), &stat, r.mode());
  write_report(mobility_table(m), r.path("mobility.csv"));
  json s;
  s["nu"] = m.nu;
  s["M"] = m.M;
  s["slope"] = m.slope;
  s["beta_measured"] = m.beta_measured;
  s["beta_predicted"] = m.beta_predicted;
  s["relative_error"] = std::abs(m.beta_measured - m.beta_predicted) / m.beta_predicted;
  s["failures"] = m.failures;
  write_json(s, r.path("summary.json"));
  r.periodization(stat);
  if (!m.failures.empty()) {
    std::cerr << "mobility: " << m.failures.size() << " solves failed\n";
    return kExitSolver;
  }
  return 0;
}

int cmd_spectrum(Run& r) {
  std::string op = r.get("op");
  double nu = r.num("nu");
  Profile stat = static_wall(r);
  Profile p = (op == "Lc" || op == "Ac") ? moving_wall(r, stat, r.num("H")) : stat;
  DiscretizedOperator D;
  if (op == "L")
    D = build_L(p);
  else if (op == "Lc")
    D = build_Lc(p);
  else if (op == "A")
    D = build_block(p, false, nu);
  else if (op == "Ac")
    D = build_block(p, true, nu);
  else
    throw ConfigError("op must be one of L, Lc, A, Ac");
  SpectrumReport rep = eig_report(D, p);
  write_report(spectrum_table(rep), r.path("spectrum.csv"), parse_format(r.get("format")) );
  json s;
  s["op"] = op;
  s["c"] = p.c;
  s["lambda0"] = complex_json(rep.lambda0);
  s["gap"] = rep.gap;
  s["Lambda0"] = rep.Lambda0;
  s["cluster"] = rep.cluster;
  double delta = r.num("delta");
  s["delta"] = delta;
  s["count_inside_gamma"] = rep.count_inside(delta);
  s["max_re_rest"] = rep.max_re_rest();
  if (op == "A") {
    SpectrumReport rL = eig_report(build_L(stat), stat);
    PencilCheck pc = pencil_crosscheck(rL, rep, nu);
    s["zeta_pencil"] = std::min(nu / 2, (nu - std::sqrt(std::max(nu * nu - 4 * rL.Lambda0, 0.0))) / 2);
    s["pencil_max_distance"] = pc.max_distance;
    s["pencil_unmatched"] = pc.unmatched.size();
  }
  write_json(s, r.path("summary.json"));
  r.periodization(p);
  return 0;
}

int cmd_resolvent_sweep(Run& r) {
  Profile stat = static_wall(r);
  double nu = r.num("nu"), delta = r.num("delta");
  DiscretizedOperator A = build_block(stat, false, nu);
  SweepOptions opt;
  opt.radii = static_cast<int>(r.integer("radii"));
  opt.angles = static_cast<int>(r.integer("angles"));
  opt.gamma_points = static_cast<int>(r.integer("gamma-points"));
  SweepResult res = resolvent_sweep(A, delta, opt);
  write_report(sweep_table(res), r.path("sweep.csv"), parse_format(r.get("format")));
  json s;
  s["delta"] = delta;
  s["numerical_abscissa"] = res.w;
  s["M1"] = res.M1;
  s["sup_norm_inv"] = res.sup_inv;
  s["sup_norm_Ares"] = res.sup_A;
  s["sup_norm_inv_gamma"] = res.sup_inv_gamma;
  s["sup_norm_Ares_gamma"] = res.sup_A_gamma;
  s["sup_norm_inv_G"] = json::array({res.sup_inv_G[0], res.sup_inv_G[1], res.sup_inv_G[2]});
  s["sup_norm_Ares_G"] = json::array({res.sup_A_G[0], res.sup_A_G[1], res.sup_A_G[2]});
  s["envelope_excess"] = res.envelope_excess;
  s["flagged"] = res.flagged;
  s["retried"] = res.retried;
  s["samples"] = res.samples.size();
  write_json(s, r.path("summary.json"));
  r.periodization(stat);
  return 0;
}

int cmd_relative_bound(Run& r) {
  Profile stat = static_wall(r);
  Profile mov = moving_wall(r, stat, r.num("H"));
  BoundFit b = relative_bound_fit(mov, stat, static_cast<int>(r.integer("samples")), r.seed());
  write_report(bound_table(b), r.path("bound.csv"), parse_format(r.get("format")));
  json s;
  s["H"] = mov.H;
  s["c"] = b.c;
  s["a"] = b.a;
  s["b"] = b.b;
  s["a_star"] = b.a_star;
  s["b_star"] = b.b_star;
  write_json(s, r.path("summary.json"));
  r.periodization(mov);
  return 0;
}

Shape parse_shape(const std::string& s) {
  if (s == "sech") return Shape::sech;
  if (s == "odd_sech") return Shape::odd_sech;
  if (s == "noise") return Shape::noise;
  throw ConfigError("shape must be sech, odd_sech or noise");
}

SimConfig sim_config(const Run& r) {
  SimConfig c;
  c.dt = r.num("dt");
  c.t_end = r.num("t-end");
  c.nu = r.num("nu");
  c.mode = r.mode();
  c.validate();
  return c;
}

int cmd_simulate(Run& r) {
  SimConfig cfg = sim_config(r);
  Profile stat = static_wall(r);
  Profile ref = moving_wall(r, stat, r.num("H"));
  cfg.H = ref.H;
  cfg.c = ref.c;
  Perturbation pert{parse_shape(r.get("shape")), r.num("amplitude"), r.seed()};
  if (std::abs(pert.amplitude) > 0.5) throw ConfigError("amplitude must be at most 0.5");
  const Grid& g = ref.theta.grid;
  Field th0 = ref.theta, p = perturbation_field(g, pert);
  for (int j = 0; j < g.n; ++j) th0.values[j] += p.values[j];
  r.periodization(ref);
  int code = 0;
  SimTrace tr;
  std::string error;
  try {
    tr = integrate(cfg, StateVector(th0, Field::zeros(g)), &ref);
  } catch (const SimulationError& e) {
    tr = e.trace;
    error = e.what();
    code = kExitSolver;
  }
  write_report(trace_table(tr), r.path("trace.csv"), parse_format(r.get("format")));
  json s;
  s["H"] = ref.H;
  s["c"] = ref.c;
  s["final_residual_H1"] = tr.residual_H1.empty() ? 0.0 : tr.residual_H1.back();
  s["final_wall_position"] = tr.wall_position.empty() ? 0.0 : tr.wall_position.back();
  double dmax = 0.0;
  for (double d : tr.defect) dmax = std::max(dmax, std::abs(d));
  s["max_energy_defect"] = dmax;
  s["error"] = error;
  write_json(s, r.path("summary.json"));
  if (code) std::cerr << "simulate: " << error << "\n";
  return code;
}

int cmd_orbital(Run& r) {
  SimConfig cfg = sim_config(r);
  Profile stat = static_wall(r);
  Profile ref = moving_wall(r, stat, r.num("H"));
  Perturbation pert{parse_shape(r.get("shape")), r.num("amplitude"), r.seed()};
  OrbitalResult o = orbital_experiment(ref, pert, cfg);
  write_report(trace_table(o.trace), r.path("trace.csv"), parse_format(r.get("format")));
  json s;
  s["H"] = o.H;
  s["c"] = o.c;
  s["nu"] = o.nu;
  s["perturbation_H1"] = o.perturbation_H1;
  s["omega"] = o.fit.omega;
  s["C"] = o.fit.C;
  s["r2"] = o.fit.r2;
  s["fit_points"] = o.fit.points;
  s["speed"] = o.speed;
  s["final_position"] = o.final_position;
  s["predicted_shift"] = o.predicted_shift;
  s["A2_ratio"] = o.A2_ratio;
  s["A2_bound"] = o.A2_bound;
  s["A3_exponent"] = o.A3_exponent;
  s["stable"] = o.stable;
  s["verdict"] = o.verdict;
  write_json(s, r.path("summary.json"));
  r.periodization(ref);
  return o.verdict.rfind("unstable", 0) == 0 ? kExitSolver : 0;
}

json check_json(const LemmaCheck& c) {
  json j;
  j["name"] = c.name;
  j["samples"] = c.samples;
  j["violations"] = c.violations;
  j["holds"] = c.holds();
  j["min_margin"] = c.min_margin;
  j["worst_phi"] = c.worst_phi;
  j["worst_lambda"] = complex_json(c.worst_lambda);
  j["bound_at_worst"] = c.bound;
  return j;
}

json scan_json(const MScan& m) {
  json j;
  j["samples"] = m.samples;
  j["sup"] = m.sup;
  j["sup_phi"] = m.sup_phi;
  j["sup_lambda"] = complex_json(m.sup_lambda);
  j["sup_H1"] = m.sup_part[0];
  j["sup_H2"] = m.sup_part[1];
  j["sup_H3"] = m.sup_part[2];
  j["count_H1"] = m.count_part[0];
  j["count_H2"] = m.count_part[1];
  j["count_H3"] = m.count_part[2];
  j["H3_first_max"] = m.H3_first_max;
  j["H3_bound"] = m.H3_bound;
  j["infinite"] = m.infinite;
  return j;
}

int cmd_appendix_check(Run& r) {
  double nu = r.num("nu"), delta = r.num("delta");
  double Lambda0;
  if (r.get("Lambda0") == "auto") {
    Profile stat = static_wall(r);
    Lambda0 = eig_report(build_L(stat), stat).Lambda0;
    r.periodization(stat);
  } else {
    Lambda0 = r.num("Lambda0");
  }
  double beta = r.get("beta") == "auto" ? 0.5 * (1.0 + 2.0 * delta / nu) : r.num("beta");
  RegionParams p;
  try {
    p = RegionParams(nu, delta, Lambda0, beta);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  AppendixReport rep = appendix_check(p, r.integer("samples"), r.integer("m-samples"), r.seed());
  json j;
  j["nu"] = p.nu;
  j["delta"] = p.delta;
  j["Lambda0"] = p.Lambda0;
  j["beta"] = p.beta;
  j["epsilon"] = p.epsilon();
  j["seed"] = rep.seed;
  j["form_error"] = rep.form_error;
  j["checks"] = json::array();
  for (const auto& c : rep.checks) j["checks"].push_back(check_json(c));
  j["M_scan"] = scan_json(rep.scan);
  j["M_scan_4x"] = scan_json(rep.scan4);
  j["M_sup_change"] = rep.sup_change;
  j["H3_limit_first_argument"] = rep.H3_limit;
  write_json(j, r.path("appendix.json"));
  return 0;
}

struct Setting {
  std::string key;
  std::string help;
  std::string value;
  CLI::Option* opt = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving Neel wall toolkit", "neelwall"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);

  std::vector<Setting> settings = {
      {"L", "half length of the periodic domain", ""},
      {"n", "grid points", ""},
      {"nu", "damping", ""},
      {"H", "applied field; a comma list for mobility", ""},
      {"delta", "half side of the contour square", ""},
      {"dt", "time step", ""},
      {"t-end", "final time", ""},
      {"seed", "random seed", ""},
      {"out", "output directory", ""},
      {"mode", "nonlocal or local", ""},
      {"tol", "profile solver tolerance", ""},
      {"op", "operator for spectrum: L, Lc, A, Ac", ""},
      {"format", "csv or jsonl", ""},
      {"shape", "perturbation: sech, odd_sech, noise", ""},
      {"amplitude", "perturbation amplitude", ""},
      {"samples", "sample count", ""},
      {"m-samples", "samples for the M scan", ""},
      {"Lambda0", "spectral constant, or auto", ""},
      {"beta", "constant in (2 delta / nu, 1), or auto", ""},
      {"radii", "sweep radii", ""},
      {"angles", "sweep angles", ""},
      {"gamma-points", "contour points", ""},
  };
  std::string config_path;
  for (auto& s : settings) s.opt = app.add_option("--" + s.key, s.value, s.help);
  app.add_option("--config", config_path, "key = value settings file");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve-static", "static wall profile"},
      {"solve-moving", "traveling wall at field H"},
      {"mobility", "speed against field"},
      {"spectrum", "eigenvalue report"},
      {"resolvent-sweep", "resolvent norms over the region G"},
      {"relative-bound", "relative bound of the speed perturbation"},
      {"simulate", "time integration from a perturbed wall"},
      {"orbital", "orbital stability experiment"},
      {"appendix-check", "sampled checks of the appendix inequalities"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  const bool mob = run.command == "mobility", sim = run.command == "simulate" || run.command == "orbital";
  run.cfg = {{"L", "40"},
             {"n", run.command == "resolvent-sweep" ? "256" : "2048"},
             {"nu", "1"},
             {"H", mob ? "0.0005,0.001,0.002,-0.0005,-0.001,-0.002" : (sim ? "0" : "0.001")},
             {"delta", "0.25"},
             {"dt", "0.001"},
             {"t-end", "40"},
             {"seed", "1"},
             {"out", "out"},
             {"mode", "nonlocal"},
             {"tol", "1e-10"},
             {"op", "A"},
             {"format", "csv"},
             {"shape", "sech"},
             {"amplitude", "0.05"},
             {"samples", run.command == "appendix-check" ? "100000" : "500"},
             {"m-samples", "1000000"},
             {"Lambda0", "auto"},
             {"beta", "auto"},
             {"radii", "40"},
             {"angles", "40"},
             {"gamma-points", "64"}};
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_config(config_path)) {
        if (!run.cfg.count(k)) throw ConfigError("unknown key '" + k + "' in " + config_path);
        run.cfg[k] = v;
      }
      run.cfg["config"] = config_path;
    }
    for (const auto& s : settings)
      if (s.opt->count()) run.cfg[s.key] = s.value;
    run.out = run.get("out");
    fs::create_directories(run.out);
    Grid g = run.grid();
    run.mode();
    run.manifest.command = run.command;
    run.manifest.L = g.L;
    run.manifest.n = g.n;
    run.manifest.seeds = {run.seed()};
  } catch (const std::exception& e) {
    std::cerr << "neelwall: " << e.what() << "\n";
    return kExitConfig;
  }

  int code = 0;
  try {
    const std::string& c = run.command;
    if (c == "solve-static") code = cmd_solve_static(run);
    else if (c == "solve-moving") code = cmd_solve_moving(run);
    else if (c == "mobility") code = cmd_mobility(run);
    else if (c == "spectrum") code = cmd_spectrum(run);
    else if (c == "resolvent-sweep") code = cmd_resolvent_sweep(run);
    else if (c == "relative-bound") code = cmd_relative_bound(run);
    else if (c == "simulate") code = cmd_simulate(run);
    else if (c == "orbital") code = cmd_orbital(run);
    else if (c == "appendix-check") code = cmd_appendix_check(run);
  } catch (const std::invalid_argument& e) {
    std::cerr << "neelwall: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "neelwall: " << run.command << " failed: " << e.what() << "\n";
    return kExitSolver;
  }
  run.manifest.config = run.cfg;
  run.manifest.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    run.manifest.write(run.out.string());
  } catch (const std::exception& e) {
    std::cerr << "neelwall: " << e.what() << "\n";
    return kExitSolver;
  }
  return code;
}
