// solnet: command-line front end for the three-soliton sensor-network model.
//
// Every subcommand computes its results in memory, then writes the data files
// and a <command>.manifest.json into --out. Data files carry no timestamps.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "solnet/solnet.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace solnet;

namespace {

struct RunConfig {
  std::string command;
  int particles = 20;
  int k = 1;
  std::string lambda;
  std::string eta = "1,0.99,0.9,0.8";
  std::string out = ".";
  double tol = 0.0;  // 0 selects the per-command default
  unsigned workers = 0;
  std::string format = "csv";

  // lambda-cr
  double lo = 3.0, hi = 3.6;
  // semiclassical
  std::string n0 = "0.3333333333333333,0.3333333333333333,0.3333333333333334";
  std::string theta0 = "0,0,0";
  double tau = 100.0;
  double dt = 0.1;
  // chi
  std::string n_list = "10,20,40";
  // bounds
  std::string d_list = "2,3,4";
};

struct Output {
  std::string name;
  std::string content;
};

struct Result {
  std::vector<Output> files;
  json info = json::object();
};

std::string ext(const RunConfig& c) { return c.format == "json" ? ".json" : ".csv"; }

unsigned resolve_workers(unsigned flag) {
  if (const char* env = std::getenv("SOLITON_SENSORNET_WORKERS")) {
    const std::string s(env);
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used != s.size() || v < 1) throw std::invalid_argument(s);
      return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw ConfigError("SOLITON_SENSORNET_WORKERS must be a positive integer, got '" + s + "'");
    }
  }
  return flag ? flag : default_workers();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : io::parse_list(text)) {
    if (v != static_cast<int>(v) || v < 1) throw ConfigError("'" + text + "' must list positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::array<double, 3> parse_triple(const std::string& text) {
  const auto v = io::parse_list(text);
  if (v.size() != 3) throw ConfigError("'" + text + "' must have three comma-separated values");
  return {v[0], v[1], v[2]};
}

void check_common(const RunConfig& c) {
  if (c.particles < 1) throw ConfigError("--N must be >= 1");
  if (c.k < 1) throw ConfigError("--k must be >= 1");
  if (!(c.tol >= 0.0)) throw ConfigError("--tol must be >= 0");
  std::error_code ec;
  if (!fs::is_directory(c.out, ec)) throw ConfigError("output directory '" + c.out + "' does not exist");
}

// ---------------------------------------------------------------------------

Result cmd_spectrum(const RunConfig& c, unsigned workers) {
  const auto grid = io::parse_list(c.lambda.empty() ? "0:6:121" : c.lambda);
  std::vector<SpectrumResult> spectra(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    spectra[i] = spectrum(build_hamiltonian({c.particles, grid[i], 1.0}), false);
  });
  io::Table t{{"Lambda", "eigen_index", "lambda", "E_over_kappaN"}, {}};
  for (const auto& s : spectra)
    for (std::size_t j = 0; j < s.values.size(); ++j)
      t.add({s.lambda, static_cast<long long>(j), s.values[j], energy_per_kappa_n(s.values[j])});
  Result r;
  r.files.push_back({"spectrum" + ext(c), t.render(c.format)});
  r.info["grid"] = grid;
  r.info["solver"] = {{"eigensolver", "dense tridiagonal QL"}, {"dimension", FockBasis3::dimension(c.particles)}};
  return r;
}

Result cmd_ground(const RunConfig& c, unsigned workers) {
  const auto grid = io::parse_list(c.lambda.empty() ? "0,3.30272,3.305" : c.lambda);
  std::vector<std::optional<GroundState>> gs(grid.size());
  parallel_for(grid.size(), workers,
               [&](std::size_t i) { gs[i].emplace(ground_state(build_hamiltonian({c.particles, grid[i], 1.0}))); });
  Result r;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GroundState& g = *gs[i];
    char stem[32];
    std::snprintf(stem, sizeof stem, "ground_%03zu", i);
    r.files.push_back({std::string(stem) + ext(c), io::state_table(g.state).render(c.format)});
    json side = {{"N", c.particles},
                 {"Lambda", grid[i]},
                 {"lambda0", g.lambda0},
                 {"noon_fidelity", noon_fidelity(g.state)},
                 {"edge_population", edge_population(g.state)},
                 {"gap", g.gap()},
                 {"degenerate", g.degenerate}};
    r.files.push_back({std::string(stem) + ".sidecar.json", side.dump(2) + "\n"});
  }
  r.info["grid"] = grid;
  r.info["solver"] = {{"degeneracy_gap", GroundStateOptions{}.degeneracy_gap},
                      {"dense_limit", GroundStateOptions{}.dense_limit}};
  return r;
}

Result cmd_sweep_sigma(const RunConfig& c, unsigned workers) {
  const auto grid = io::parse_list(c.lambda.empty() ? "0:6:61" : c.lambda);
  const auto etas = io::parse_list(c.eta);
  for (double l : grid)
    if (!(l >= 0.0)) throw ConfigError("--lambda values must be >= 0");
  const auto rows = sigma_sweep(c.particles, c.k, grid, etas, {workers, {}});
  io::Table t{{"Lambda", "eta", "N", "k", "sigma", "sigma_GHL", "sigma_OS", "sigma_classical"}, {}};
  json failures = json::array();
  for (const auto& row : rows) {
    t.add({row.lambda, row.eta, static_cast<long long>(row.particles), static_cast<long long>(row.k), row.sigma,
           row.sigma_ghl, row.sigma_os, row.sigma_classical});
    if (!row.error.empty()) failures.push_back({{"Lambda", row.lambda}, {"eta", row.eta}, {"error", row.error}});
  }
  Result r;
  r.files.push_back({"sweep" + ext(c), t.render(c.format)});
  r.info["grid"] = {{"Lambda", grid}, {"eta", etas}};
  r.info["classical_baseline"] = c.k == 1 ? "SIL" : "NIL";
  r.info["failures"] = failures;
  return r;
}

Result cmd_semiclassical(const RunConfig& c, unsigned) {
  const auto grid = io::parse_list(c.lambda.empty() ? "1" : c.lambda);
  if (grid.size() != 1) throw ConfigError("semiclassical takes a single --lambda value");
  if (!(c.tau > 0.0)) throw ConfigError("--tau must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("--dt must be positive");
  SemiclassicalState s0{parse_triple(c.n0), parse_triple(c.theta0)};
  s0.validate(1e-9);
  const double tol = c.tol > 0.0 ? c.tol : 1e-9;
  IntegrateOptions opt;
  opt.output_dt = c.dt;
  const auto traj = integrate(s0, grid[0], c.tau, tol, opt);
  io::Table t{{"tau", "n1", "n2", "n3", "Theta12", "Theta23", "Theta31", "Heff"}, {}};
  for (const auto& p : traj.points)
    t.add({p.tau, p.state.n[0], p.state.n[1], p.state.n[2], p.state.theta[0], p.state.theta[1], p.state.theta[2],
           p.energy});
  Result r;
  r.files.push_back({"trajectory" + ext(c), t.render(c.format)});
  r.info["grid"] = {{"Lambda", grid[0]}, {"tau", c.tau}, {"dt", c.dt}};
  r.info["solver"] = {{"integrator", "DOPRI5"}, {"step_tolerance", traj.step_tolerance}};
  r.info["diagnostics"] = {{"energy_drift", traj.energy_drift}, {"normalization_drift", traj.normalization_drift}};
  return r;
}

Result cmd_chi(const RunConfig& c, unsigned) {
  const auto ns = parse_int_list(c.n_list);
  const double lambda = c.lambda.empty() ? kChiEvaluationLambda : io::parse_grid(c.lambda).at(0);
  io::Table t{{"N", "branch", "Lambda", "theta", "fisher", "sigma", "sigma_N3"}, {}};
  for (int n : ns)
    for (auto b : {PhaseBranch::In, PhaseBranch::Out}) {
      const auto q = chi_qfi_pm(n, lambda, b);
      if (q.singular) throw NumericalError("chi: stationary phase is singular at this Lambda");
      t.add({static_cast<long long>(n), std::string(to_string(b)), lambda, q.theta, q.fisher, q.sigma,
             q.sigma * ipow(n, 3)});
    }
  Result r;
  r.files.push_back({"chi" + ext(c), t.render(c.format)});
  r.info["grid"] = {{"N", ns}, {"Lambda", lambda}};
  return r;
}

Result cmd_lambda_cr(const RunConfig& c, unsigned) {
  const double tol = c.tol > 0.0 ? c.tol : 1e-5;
  const auto cp = detect_lambda_cr(c.particles, c.lo, c.hi, tol);
  io::Table t{{"N", "lambda_cr", "lo", "hi", "tol", "order_lo", "order_hi", "iterations"}, {}};
  t.add({static_cast<long long>(c.particles), cp.lambda_cr, cp.lo, cp.hi, tol, cp.order_lo, cp.order_hi,
         static_cast<long long>(cp.iterations)});
  Result r;
  r.files.push_back({"lambda_cr" + ext(c), t.render(c.format)});
  r.info["grid"] = {{"bracket", {c.lo, c.hi}}};
  r.info["solver"] = {{"order_parameter", "edge population"}, {"threshold", 0.5}};
  return r;
}

Result cmd_bounds(const RunConfig& c, unsigned) {
  const auto ds = parse_int_list(c.d_list);
  io::Table t{{"d", "N", "k", "eps", "sigma", "label"}, {}};
  for (const auto& row : bound_table(ds, c.particles, c.k))
    t.add({static_cast<long long>(row.d), static_cast<long long>(row.particles), static_cast<long long>(row.k),
           row.eps, row.sigma, row.label});
  Result r;
  r.files.push_back({"bounds" + ext(c), t.render(c.format)});
  r.info["grid"] = {{"d", ds}};
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-soliton quantum sensor network: spectra, ground states, QFI bounds and dynamics"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool with_lambda = true) {
    sub->add_option("--N", cfg.particles, "total particle number")->capture_default_str();
    sub->add_option("--k", cfg.k, "phase generator power N^k")->capture_default_str();
    if (with_lambda) sub->add_option("--lambda", cfg.lambda, "Lambda values: start:stop:count or comma list");
    sub->add_option("--out", cfg.out, "existing output directory")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "tolerance override (0 = command default)");
    sub->add_option("--workers", cfg.workers, "worker threads (default: logical CPUs)");
    sub->add_option("--format", cfg.format, "data file format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  std::map<std::string, Result (*)(const RunConfig&, unsigned)> handlers;
  auto add = [&](const std::string& name, const std::string& help, Result (*fn)(const RunConfig&, unsigned)) {
    auto* sub = app.add_subcommand(name, help);
    handlers[name] = fn;
    return sub;
  };

  common(add("spectrum", "full spectrum over a Lambda grid", cmd_spectrum));
  common(add("ground", "ground state and sidecar per Lambda", cmd_ground));
  {
    auto* sub = add("sweep-sigma", "lossy accuracy bound sigma^(k) over Lambda and eta", cmd_sweep_sigma);
    common(sub);
    sub->add_option("--eta", cfg.eta, "transparencies, comma list")->capture_default_str();
  }
  {
    auto* sub = add("semiclassical", "integrate the variational equations", cmd_semiclassical);
    common(sub);
    sub->add_option("--n0", cfg.n0, "initial populations n1,n2,n3");
    sub->add_option("--theta0", cfg.theta0, "initial phases Theta12,Theta23,Theta31")->capture_default_str();
    sub->add_option("--tau", cfg.tau, "final dimensionless time")->capture_default_str();
    sub->add_option("--dt", cfg.dt, "output spacing")->capture_default_str();
  }
  {
    auto* sub = add("chi", "chi accuracy of the in/out-of-phase N00N states", cmd_chi);
    common(sub);
    sub->add_option("--Ns", cfg.n_list, "particle numbers, comma list")->capture_default_str();
  }
  {
    auto* sub = add("lambda-cr", "locate the ground-state transition", cmd_lambda_cr);
    common(sub, false);
    sub->add_option("--lo", cfg.lo, "bracket lower end")->capture_default_str();
    sub->add_option("--hi", cfg.hi, "bracket upper end")->capture_default_str();
  }
  {
    auto* sub = add("bounds", "ideal multiparameter bounds table", cmd_bounds);
    common(sub, false);
    sub->add_option("--d", cfg.d_list, "numbers of estimated phases, comma list")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    return fail(2, "config", e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();

  try {
    check_common(cfg);
    const unsigned workers = resolve_workers(cfg.workers);
    const auto t0 = std::chrono::steady_clock::now();
    Result r = handlers.at(cfg.command)(cfg, workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json args = json::array();
    for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
    json manifest = {{"command", cfg.command},
                     {"args", args},
                     {"config",
                      {{"N", cfg.particles},
                       {"k", cfg.k},
                       {"lambda", cfg.lambda},
                       {"eta", cfg.eta},
                       {"tol", cfg.tol},
                       {"format", cfg.format}}},
                     {"workers", workers},
                     {"wall_time_s", wall},
                     {"timestamp", utc_timestamp()}};
    manifest.update(r.info);
    json outputs = json::array();
    for (const auto& f : r.files) outputs.push_back(f.name);
    manifest["outputs"] = outputs;

    for (const auto& f : r.files) io::write_file(fs::path(cfg.out) / f.name, f.content);
    io::write_file(fs::path(cfg.out) / (cfg.command + ".manifest.json"), manifest.dump(2) + "\n");

    if (r.info.contains("failures") && !r.info["failures"].empty())
      return fail(3, "numerical", std::to_string(r.info["failures"].size()) + " grid point(s) failed; see manifest");
    return 0;
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what());
  } catch (const DomainError& e) {
    return fail(2, "domain", e.what());
  } catch (const NumericalError& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(3, "numerical", e.what());
  }
}
