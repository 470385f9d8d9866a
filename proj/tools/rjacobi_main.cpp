// Command-line front end: five subcommands (simulate, convergence, ergodic,
// density, neuron), each driven by a JSON config file. Every run writes its
// outputs plus a manifest.json into --out. Exit codes: 0 success, 2 config
// validation error (message names the offending field), 1 computational
// error (message carries the module and step).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rjacobi/csv.hpp"
#include "rjacobi/ergodic.hpp"
#include "rjacobi/euler_solver.hpp"
#include "rjacobi/gaussian_paths.hpp"
#include "rjacobi/jacobi_transform.hpp"
#include "rjacobi/malliavin_density.hpp"
#include "rjacobi/morris_lecar.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

const json& require_field(const json& j, const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("config field '" + key + "' is missing");
  return j.at(key);
}

double require_number(const json& j, const std::string& key) {
  const json& v = require_field(j, key);
  if (!v.is_number())
    throw ConfigError("config field '" + key + "' must be a number");
  return v.get<double>();
}

double require_positive(const json& j, const std::string& key) {
  const double v = require_number(j, key);
  if (!(v > 0.0))
    throw ConfigError("config field '" + key + "' must be positive");
  return v;
}

std::size_t require_count(const json& j, const std::string& key) {
  const json& v = require_field(j, key);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
    throw ConfigError("config field '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v.get<std::uint64_t>());
}

std::uint64_t require_seed(const json& j, const std::string& key) {
  const json& v = require_field(j, key);
  if (!v.is_number_unsigned())
    throw ConfigError("config field '" + key +
                      "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

double optional_number(const json& j, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number())
    throw ConfigError("config field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

rjacobi::ModelParams parse_params(const json& cfg) {
  const json& p = require_field(cfg, "params");
  if (!p.is_object())
    throw ConfigError("config field 'params' must be an object");
  rjacobi::ModelParams m;
  m.theta = require_number(p, "theta");
  m.mu = require_number(p, "mu");
  m.gamma = require_number(p, "gamma");
  m.beta = require_number(p, "beta");
  m.alpha = require_number(p, "alpha");
  m.validate();
  return m;
}

double parse_root_tol(const json& cfg) {
  const double tol = optional_number(cfg, "root_tol", 1e-12);
  if (!(tol > 0.0))
    throw ConfigError("config field 'root_tol' must be positive");
  return tol;
}

// Initial state: either "x0" directly or "y0" in transformed coordinates.
double parse_x0(const json& cfg, const rjacobi::TransformTable& table) {
  if (cfg.contains("y0")) {
    const double y0 = require_number(cfg, "y0");
    if (!(y0 > 0.0 && y0 < table.F1()))
      throw ConfigError("config field 'y0' must lie in (0, F1)");
    return table.F_inv(y0);
  }
  const double x0 = require_number(cfg, "x0");
  if (!(x0 > 0.0 && x0 < 1.0))
    throw ConfigError("config field 'x0' must lie in (0,1)");
  return x0;
}

struct RunContext {
  fs::path out_dir;
  json config;
  unsigned threads = 1;
  std::vector<std::string> outputs;

  fs::path path_of(const std::string& name) { return out_dir / name; }
  void record(const std::string& name) { outputs.push_back(name); }
};

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// ---------------------------------------------------------------- simulate

void cmd_simulate(RunContext& ctx) {
  const json& cfg = ctx.config;
  const rjacobi::ModelParams params = parse_params(cfg);
  const double T = require_positive(cfg, "T");
  const std::size_t n = require_count(cfg, "n");
  const double H = require_positive(cfg, "H");
  const std::uint64_t seed = require_seed(cfg, "seed");
  const double root_tol = parse_root_tol(cfg);

  std::vector<double> x0s;
  const json& x0_field = require_field(cfg, "x0");
  if (x0_field.is_array()) {
    for (const auto& v : x0_field) {
      if (!v.is_number())
        throw ConfigError("config field 'x0' must hold numbers");
      x0s.push_back(v.get<double>());
    }
    if (x0s.empty())
      throw ConfigError("config field 'x0' must not be empty");
  } else if (x0_field.is_number()) {
    x0s.push_back(x0_field.get<double>());
  } else {
    throw ConfigError("config field 'x0' must be a number or array");
  }
  for (double x0 : x0s) {
    if (!(x0 > 0.0 && x0 < 1.0))
      throw ConfigError("config field 'x0' entries must lie in (0,1)");
  }

  const rjacobi::TransformTable table(params.beta);
  const rjacobi::GaussianPath w = rjacobi::sample_fbm(T, n, H, seed);

  {  // driver CSV: t,w
    std::vector<double> ts(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) ts[i] = w.time(i);
    rjacobi::write_csv(ctx.path_of("driver.csv").string(), {"t", "w"},
                       {ts, w.values});
    ctx.record("driver.csv");
  }

  // All initial states share the one driver, so trajectories are directly
  // comparable (the scheme preserves their ordering).
  for (std::size_t i = 0; i < x0s.size(); ++i) {
    rjacobi::SolverConfig sc;
    sc.T = T;
    sc.n = n;
    sc.root_tol = root_tol;
    sc.params = params;
    const rjacobi::SolutionPath sol =
        rjacobi::solve_path(w, x0s[i], sc, table);
    const std::string name = "path_" + std::to_string(i + 1) + ".csv";
    rjacobi::write_csv(ctx.path_of(name).string(), {"t", "y", "x"},
                       {sol.times, sol.y, sol.x});
    ctx.record(name);
  }
}

// -------------------------------------------------------------- convergence

void cmd_convergence(RunContext& ctx) {
  const json& cfg = ctx.config;
  const rjacobi::ModelParams params = parse_params(cfg);
  const double T = require_positive(cfg, "T");
  const double H = require_positive(cfg, "H");
  const std::uint64_t seed = require_seed(cfg, "seed");
  const double root_tol = parse_root_tol(cfg);
  const rjacobi::TransformTable table(params.beta);
  const double x0 = parse_x0(cfg, table);
  const std::size_t n_ref = require_count(cfg, "n_ref");

  const json& nl = require_field(cfg, "n_list");
  if (!nl.is_array() || nl.empty())
    throw ConfigError("config field 'n_list' must be a nonempty array");
  std::vector<std::size_t> n_list;
  for (const auto& v : nl) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
      throw ConfigError("config field 'n_list' must hold positive integers");
    n_list.push_back(static_cast<std::size_t>(v.get<std::uint64_t>()));
  }

  rjacobi::RateReport report;
  if (cfg.contains("n_seeds") && require_count(cfg, "n_seeds") > 1) {
    const std::size_t n_seeds = require_count(cfg, "n_seeds");
    const double p = optional_number(cfg, "p", 2.0);
    if (!(p > 0.0)) throw ConfigError("config field 'p' must be positive");
    report = rjacobi::convergence_study_ensemble(
        T, H, x0, params, n_list, n_ref, p, n_seeds, seed, root_tol);
  } else {
    const rjacobi::GaussianPath w = rjacobi::sample_fbm(T, n_ref, H, seed);
    report = rjacobi::convergence_study(w, x0, params, n_list, n_ref, root_tol);
  }

  {
    std::vector<double> ns(report.ns.size());
    for (std::size_t i = 0; i < report.ns.size(); ++i)
      ns[i] = static_cast<double>(report.ns[i]);
    rjacobi::write_csv(ctx.path_of("errors.csv").string(), {"n", "error"},
                       {ns, report.sup_errors});
    ctx.record("errors.csv");
  }
  json rep;
  rep["slope"] = report.slope;
  rep["intercept"] = report.intercept;
  rep["n_ref"] = n_ref;
  rep["ns"] = report.ns;
  rep["errors"] = report.sup_errors;
  write_json_file(ctx.path_of("report.json"), rep);
  ctx.record("report.json");
}

// ------------------------------------------------------------------ ergodic

void cmd_ergodic(RunContext& ctx) {
  const json& cfg = ctx.config;
  const json& mode_field = require_field(cfg, "mode");
  if (!mode_field.is_string())
    throw ConfigError("config field 'mode' must be a string");
  const std::string mode = mode_field.get<std::string>();
  const rjacobi::ModelParams params = parse_params(cfg);
  const double T = require_positive(cfg, "T");
  const std::size_t n = require_count(cfg, "n");
  const double H = require_positive(cfg, "H");
  const double root_tol = parse_root_tol(cfg);
  const rjacobi::TransformTable table(params.beta);
  const auto identity = [](double x) { return x; };

  if (mode == "timeavg") {
    std::vector<std::uint64_t> seeds;
    if (cfg.contains("seeds")) {
      const json& sl = cfg.at("seeds");
      if (!sl.is_array() || sl.empty())
        throw ConfigError("config field 'seeds' must be a nonempty array");
      for (const auto& v : sl) {
        if (!v.is_number_unsigned())
          throw ConfigError(
              "config field 'seeds' must hold nonnegative integers");
        seeds.push_back(v.get<std::uint64_t>());
      }
    } else {
      seeds.push_back(require_seed(cfg, "seed"));
    }
    const double x0 = parse_x0(cfg, table);

    json rep;
    std::vector<double> finals;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const rjacobi::GaussianPath w = rjacobi::sample_fbm(T, n, H, seeds[i]);
      rjacobi::SolverConfig sc;
      sc.T = T;
      sc.n = n;
      sc.root_tol = root_tol;
      sc.params = params;
      const rjacobi::SolutionPath sol = rjacobi::solve_path(w, x0, sc, table);
      const rjacobi::TimeAverageSeries ta =
          rjacobi::time_average(sol, identity);
      const std::string name = "timeavg_" + std::to_string(i + 1) + ".csv";
      rjacobi::write_csv(ctx.path_of(name).string(), {"t", "S"},
                         {ta.times, ta.values});
      ctx.record(name);
      finals.push_back(ta.values.back());
    }
    rep["seeds"] = seeds;
    rep["S_T"] = finals;
    write_json_file(ctx.path_of("report.json"), rep);
    ctx.record("report.json");
    return;
  }

  if (mode == "ensemble") {
    const std::uint64_t seed = require_seed(cfg, "seed");
    const std::size_t n_paths = require_count(cfg, "n_paths");
    const std::size_t depth = require_count(cfg, "pullback_depth");
    const rjacobi::EnsembleReport rep = rjacobi::ergodic_estimate_ensemble(
        params, H, identity, T, n, n_paths, depth, seed, root_tol,
        ctx.threads);
    json out;
    out["time_avg_mean"] = rep.time_avg_mean;
    out["fixed_point_mean"] = rep.fixed_point_mean;
    out["diff"] = rep.diff;
    out["se_time_avg"] = rep.se_time_avg;
    out["se_fixed_point"] = rep.se_fixed_point;
    out["se"] = rep.se;
    out["wasserstein1"] = rep.wasserstein1;
    out["n_paths"] = rep.n_paths;
    write_json_file(ctx.path_of("report.json"), out);
    ctx.record("report.json");
    return;
  }

  throw ConfigError("config field 'mode' must be 'timeavg' or 'ensemble'");
}

// ------------------------------------------------------------------ density

void cmd_density(RunContext& ctx) {
  const json& cfg = ctx.config;
  const rjacobi::ModelParams params = parse_params(cfg);
  const double t = require_positive(cfg, "t");
  const double H = require_positive(cfg, "H");
  const std::uint64_t seed = require_seed(cfg, "seed");
  const rjacobi::TransformTable table(params.beta);
  const double x0 = parse_x0(cfg, table);

  rjacobi::DensityGridConfig grid;
  if (cfg.contains("grid")) {
    const json& g = cfg.at("grid");
    if (!g.is_object())
      throw ConfigError("config field 'grid' must be an object");
    if (g.contains("n_time")) grid.n_time = require_count(g, "n_time");
    if (g.contains("n_y")) grid.n_y = require_count(g, "n_y");
    grid.q_lo = optional_number(g, "q_lo", grid.q_lo);
    grid.q_hi = optional_number(g, "q_hi", grid.q_hi);
  }
  rjacobi::McConfig mc;
  if (cfg.contains("mc")) {
    const json& m = cfg.at("mc");
    if (!m.is_object())
      throw ConfigError("config field 'mc' must be an object");
    if (m.contains("n_outer")) mc.n_outer = require_count(m, "n_outer");
    if (m.contains("n_inner")) mc.n_inner = require_count(m, "n_inner");
    if (m.contains("u_nodes")) mc.u_nodes = require_count(m, "u_nodes");
    mc.bandwidth = optional_number(m, "bandwidth", mc.bandwidth);
    if (m.contains("drift_enabled")) {
      if (!m.at("drift_enabled").is_boolean())
        throw ConfigError("config field 'drift_enabled' must be a boolean");
      mc.drift_enabled = m.at("drift_enabled").get<bool>();
    }
  }

  rjacobi::DensityEstimate est = rjacobi::estimate_g(
      params, H, t, x0, grid, mc, seed, ctx.threads);
  est = rjacobi::nv_density(std::move(est));

  rjacobi::write_csv(ctx.path_of("density.csv").string(), {"y", "g", "f"},
                     {est.ys, est.g, est.f});
  ctx.record("density.csv");

  const rjacobi::XDensity xd = rjacobi::x_density(est, table);
  rjacobi::write_csv(ctx.path_of("x_density.csv").string(), {"x", "density"},
                     {xd.xs, xd.density});
  ctx.record("x_density.csv");

  json rep;
  rep["mean_Y"] = est.mean_Y;
  rep["mean_abs_dev"] = est.mean_abs_dev;
  rep["bandwidth"] = est.bandwidth;
  rep["mass"] = est.mass;
  rep["n_outer"] = est.n_outer;
  rep["n_inner"] = est.n_inner;
  rep["u_nodes"] = est.n_u;
  rep["t"] = est.t;
  write_json_file(ctx.path_of("report.json"), rep);
  ctx.record("report.json");
}

// ------------------------------------------------------------------- neuron

void cmd_neuron(RunContext& ctx) {
  const json& cfg = ctx.config;
  const double T = require_positive(cfg, "T");
  const std::size_t n = require_count(cfg, "n");
  const std::uint64_t seed = require_seed(cfg, "seed");
  const double x0 = require_number(cfg, "x0");
  const double v0 = require_number(cfg, "v0");
  const double root_tol = parse_root_tol(cfg);

  rjacobi::MLParams p;  // canonical values; config overrides any subset
  if (cfg.contains("ml")) {
    const json& m = cfg.at("ml");
    if (!m.is_object())
      throw ConfigError("config field 'ml' must be an object");
    p.C = optional_number(m, "C", p.C);
    p.g_Ca = optional_number(m, "g_Ca", p.g_Ca);
    p.g_K = optional_number(m, "g_K", p.g_K);
    p.g_L = optional_number(m, "g_L", p.g_L);
    p.V_Ca = optional_number(m, "V_Ca", p.V_Ca);
    p.V_K = optional_number(m, "V_K", p.V_K);
    p.V_L = optional_number(m, "V_L", p.V_L);
    p.V1 = optional_number(m, "V1", p.V1);
    p.V2 = optional_number(m, "V2", p.V2);
    p.V3 = optional_number(m, "V3", p.V3);
    p.V4 = optional_number(m, "V4", p.V4);
    p.phi = optional_number(m, "phi", p.phi);
    p.I = optional_number(m, "I", p.I);
    p.sigma_star = optional_number(m, "sigma_star", p.sigma_star);
    p.beta = optional_number(m, "beta", p.beta);
    p.H = optional_number(m, "H", p.H);
  }
  p.validate();

  const rjacobi::NeuronTrajectory traj =
      rjacobi::simulate_ml(p, T, n, x0, v0, seed, root_tol);
  rjacobi::write_csv(ctx.path_of("neuron.csv").string(), {"t", "V", "X"},
                     {traj.times, traj.V, traj.X});
  ctx.record("neuron.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rough bounded-diffusion toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 1;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "sample a driver and solve trajectories from one or "
                   "more initial states"},
      {"convergence", "grid-refinement error study against a fine reference"},
      {"ergodic", "time averages or the pullback ensemble comparison"},
      {"density", "Monte-Carlo density estimate of the transformed state"},
      {"neuron", "Morris-Lecar voltage/gate trajectory with channel noise"}};
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "worker thread cap (default 1)");
    sub->add_option("--out", out_dir, "output directory (default .)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors are validation errors
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto t_start = std::chrono::steady_clock::now();

  RunContext ctx;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("config file cannot be opened: " + config_path);
    try {
      in >> ctx.config;
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!ctx.config.is_object())
      throw ConfigError("config root must be a JSON object");
    ctx.out_dir = out_dir;
    ctx.threads = threads == 0 ? 1 : threads;
    fs::create_directories(ctx.out_dir);

    if (command == "simulate") cmd_simulate(ctx);
    else if (command == "convergence") cmd_convergence(ctx);
    else if (command == "ergodic") cmd_ergodic(ctx);
    else if (command == "density") cmd_density(ctx);
    else cmd_neuron(ctx);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error in %s: %s\n", command.c_str(), e.what());
    return 1;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["config"] = ctx.config;
  if (ctx.config.contains("seed")) manifest["seed"] = ctx.config.at("seed");
  else if (ctx.config.contains("seeds"))
    manifest["seed"] = ctx.config.at("seeds");
  manifest["threads"] = ctx.threads;
  manifest["outputs"] = ctx.outputs;
  manifest["wall_time_seconds"] = wall;
  try {
    write_json_file(ctx.out_dir / "manifest.json", manifest);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error in %s: %s\n", command.c_str(), e.what());
    return 1;
  }
  return 0;
}
