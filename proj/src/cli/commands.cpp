#include "ecodrive/cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ecodrive/error.hpp"
#include "ecodrive/evaluate.hpp"
#include "ecodrive/scenario.hpp"
#include "ecodrive/svg_plot.hpp"

namespace ecodrive::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr std::size_t kDefaultSamples = 10000;

namespace fs = std::filesystem;

// Raised for a well-formed request whose optimisation problem has no
// feasible plan.
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  unsigned threads = 1;
  std::string kernel = "auto";
};

std::string run_label(const std::string& method, double eta) {
  if (eta <= 0.0) return method;
  std::ostringstream os;
  os << method << "-eta" << eta;
  return os.str();
}

std::optional<kernels::Isa> pick_isa(const std::string& name) {
  if (name == "auto") return std::nullopt;
  const auto isa = kernels::parse_isa(name);
  if (!isa) throw ConfigError("unknown kernel '" + name + "'");
  if (!kernels::isa_available(*isa)) throw ConfigError("kernel '" + name + "' is not available on this machine");
  return isa;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_metrics_file(const RunMetrics& m, const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_metrics_csv(std::span<const RunMetrics>(&m, 1), out);
}

void plot_trajectory(const Trajectory& traj, const fs::path& path) {
  PlotSeries series{traj.method, {}, {}};
  for (const auto& s : traj.steps) {
    series.x.push_back(s.distance);
    series.y.push_back(s.velocity);
  }
  ensure_parent(path);
  write_svg_plot(path, traj.method + " velocity profile", "distance (m)", "velocity (m/s)", {series});
}

struct SolveResult {
  Trajectory trajectory;
  RunMetrics metrics;
};

SolveResult solve_scenario(const Scenario& sc, Objective objective, double eta, const Common& common) {
  SolverOptions opts;
  opts.objective = objective;
  opts.eta = eta;
  opts.threads = common.threads;
  opts.isa = pick_isa(common.kernel);
  const DPSolution sol = solve(sc.route, sc.vehicle, sc.grid, opts);
  if (!sol.feasible()) {
    std::ostringstream os;
    os << "no feasible plan for " << method_name(objective) << " at eta " << eta;
    if (sol.first_infeasible_stage()) {
      os << " (every node infeasible at distance "
         << static_cast<double>(*sol.first_infeasible_stage()) * sc.grid.distance_step << " m)";
    }
    throw Infeasible(os.str());
  }
  SolveResult r;
  r.trajectory = extract_trajectory(sol, sc.route, sc.vehicle);
  r.trajectory.scenario_hash = scenario_hash(sc);
  r.trajectory.check_invariants();
  r.metrics = metrics(r.trajectory);
  r.metrics.label = run_label(r.trajectory.method, eta);
  return r;
}

double resolve_eta(const Scenario& sc, const std::optional<double>& eta_flag, bool deterministic) {
  if (deterministic) return 0.0;
  const double eta = eta_flag ? *eta_flag : sc.solver.eta.value_or(0.0);
  if (!(eta >= 0.0 && eta <= 1.0)) throw CLI::ValidationError("--eta", "eta must lie in [0, 1]");
  return eta;
}

Objective resolve_objective(const Scenario& sc, const std::string& flag) {
  if (flag.empty()) return sc.solver.objective;
  const auto o = parse_objective(flag);
  if (!o) throw CLI::ValidationError("--objective", "expected fuel or time");
  return *o;
}

bool looks_like_trajectory(const fs::path& path) {
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  return first.rfind("# scenario_hash=", 0) == 0;
}

std::vector<RunMetrics> load_runs(const fs::path& path) {
  if (looks_like_trajectory(path)) {
    const Trajectory t = read_trajectory_csv(path);
    RunMetrics m = metrics(t);
    m.label = run_label(t.method, t.eta);
    return {m};
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_metrics_csv(in);
}

void print_violations(const ViolationReport& report, std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  out << "signal(m)  violations   rate     95% CI\n";
  for (const auto& s : report.per_signal) {
    out << std::setw(9) << std::setprecision(1) << s.position << "  " << std::setw(10) << s.violations << "  "
        << std::setprecision(4) << s.rate << "  [" << s.interval.lo << ", " << s.interval.hi << "]\n";
  }
  out << "runs with any violation: " << report.runs_with_violation << " / " << report.samples << '\n';
  out << std::defaultfloat;
}

std::vector<double> parse_etas(const std::string& text) {
  std::vector<double> etas;
  std::istringstream is(text);
  std::string token;
  while (std::getline(is, token, ',')) {
    std::size_t used = 0;
    double e = 0.0;
    try {
      e = std::stod(token, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--etas", "not a number: '" + token + "'");
    }
    if (token.find_first_not_of(" \t", used) != std::string::npos) {
      throw CLI::ValidationError("--etas", "not a number: '" + token + "'");
    }
    if (!(e >= 0.0 && e <= 1.0)) throw CLI::ValidationError("--etas", "every eta must lie in [0, 1]");
    etas.push_back(e);
  }
  if (etas.empty()) throw CLI::ValidationError("--etas", "at least one eta is required");
  return etas;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial dynamic-programming eco-driving planner", "ecodrive"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker threads for the solver and Monte-Carlo")
      ->check(CLI::Range(1u, 256u));
  app.add_option("--kernel", common.kernel, "Row relaxation kernel: auto, scalar, avx2 or neon");

  std::string scenario_arg;
  std::string objective_flag;
  std::optional<double> eta_flag;
  bool deterministic = false;
  std::string out_path;
  std::string metrics_out;
  std::string plot_path;
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = kDefaultSamples;
  std::string etas_arg;
  std::vector<std::string> inputs;
  std::string baseline;
  std::string controller;
  std::string trajectory_path;
  bool realize = false;

  auto* solve_cmd = app.add_subcommand("solve", "Solve the DP for a scenario and write the trajectory");
  solve_cmd->add_option("scenario", scenario_arg, "Builtin scenario name or scenario file")->required();
  solve_cmd->add_option("--objective", objective_flag, "fuel or time (default: scenario setting)");
  auto* eta_opt = solve_cmd->add_option("--eta", eta_flag, "Chance-constraint level in [0, 1]");
  solve_cmd->add_flag("--deterministic", deterministic, "Ignore delays, gate on the base red")->excludes(eta_opt);
  solve_cmd->add_option("--out", out_path, "Trajectory CSV path");
  solve_cmd->add_option("--metrics-out", metrics_out, "Metrics CSV path");
  solve_cmd->add_option("--plot", plot_path, "Velocity profile SVG path");

  auto* idm_cmd = app.add_subcommand("idm", "Simulate the modified IDM driver");
  idm_cmd->add_option("scenario", scenario_arg, "Builtin scenario name or scenario file")->required();
  idm_cmd->add_option("--seed", seed, "Seed for --realize and --samples");
  idm_cmd->add_flag("--realize", realize, "Run against one delay realisation drawn from --seed");
  idm_cmd->add_option("--samples", samples, "Replicates for the robust arrival quantile (with --eta)");
  idm_cmd->add_option("--eta", eta_flag, "Report the eta-quantile of arrival over sampled delays");
  idm_cmd->add_option("--out", out_path, "Trajectory CSV path");
  idm_cmd->add_option("--metrics-out", metrics_out, "Metrics CSV path");
  idm_cmd->add_option("--plot", plot_path, "Velocity profile SVG path");

  auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a list of eta values");
  sweep_cmd->add_option("scenario", scenario_arg, "Builtin scenario name or scenario file")->required();
  sweep_cmd->add_option("--objective", objective_flag, "fuel or time (default: scenario setting)");
  sweep_cmd->add_option("--etas", etas_arg, "Comma-separated eta values, e.g. 0.1,0.5,0.9")->required();
  sweep_cmd->add_option("--out", out_path, "Output directory");
  sweep_cmd->add_option("--plot", plot_path, "Normalised arrival/fuel SVG path");

  auto* eval_cmd = app.add_subcommand("evaluate", "Monte-Carlo signal violations of a plan or of the IDM");
  eval_cmd->add_option("trajectory", trajectory_path, "Planned trajectory CSV (open loop)");
  eval_cmd->add_option("--scenario", scenario_arg, "Scenario the plan was made for")->required();
  eval_cmd->add_option("--controller", controller, "Closed-loop controller to simulate instead (idm)")
      ->check(CLI::IsMember({"idm"}));
  eval_cmd->add_option("--samples", samples, "Replicates")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", seed, "Master seed");
  eval_cmd->add_option("--out", out_path, "Directory for violations.csv and histogram.csv");

  auto* table_cmd = app.add_subcommand("table", "Comparison table from trajectory or metrics CSVs");
  table_cmd->add_option("runs", inputs, "Trajectory or metrics CSV files")->required();
  table_cmd->add_option("--baseline", baseline, "Label of the reference run (default: op-time if present)");
  table_cmd->add_option("--out", out_path, "Metrics CSV with every run");

  auto* list_cmd = app.add_subcommand("scenarios", "List builtin scenarios");

  auto* export_cmd = app.add_subcommand("export-scenario", "Write a builtin scenario as a JSON file");
  export_cmd->add_option("name", scenario_arg, "Builtin scenario name")->required();
  export_cmd->add_option("--out", out_path, "Destination file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (app.got_subcommand(list_cmd)) {
      for (const auto& sc : builtin_scenarios()) {
        out << std::left << std::setw(26) << sc.name << sc.description << '\n';
      }
      return kSuccess;
    }

    if (app.got_subcommand(export_cmd)) {
      const auto sc = builtin_scenario(scenario_arg);
      if (!sc) throw ConfigError("unknown builtin scenario '" + scenario_arg + "'");
      ensure_parent(out_path);
      save_scenario(*sc, out_path);
      out << "wrote " << out_path << " (hash " << scenario_hash(*sc) << ")\n";
      return kSuccess;
    }

    if (app.got_subcommand(solve_cmd)) {
      const Scenario sc = resolve_scenario(scenario_arg);
      const Objective objective = resolve_objective(sc, objective_flag);
      const double eta = resolve_eta(sc, eta_flag, deterministic);
      const SolveResult r = solve_scenario(sc, objective, eta, common);
      if (!out_path.empty()) {
        ensure_parent(out_path);
        write_trajectory_csv(r.trajectory, fs::path(out_path));
      }
      if (!metrics_out.empty()) write_metrics_file(r.metrics, metrics_out);
      if (!plot_path.empty()) plot_trajectory(r.trajectory, plot_path);
      out << "scenario " << sc.name << " (hash " << r.trajectory.scenario_hash << ")\n";
      write_metrics_table(std::span<const RunMetrics>(&r.metrics, 1), nullptr, out);
      return kSuccess;
    }

    if (app.got_subcommand(idm_cmd)) {
      const Scenario sc = resolve_scenario(scenario_arg);
      std::vector<double> delays;
      if (realize) {
        Rng rng(derive_seed(seed, 0));
        delays.assign(sc.route.signals.size(), 0.0);
        for (std::size_t i = 0; i < sc.route.signals.size(); ++i) {
          const auto& sig = sc.route.signals[i];
          if (sig.kind != SignalKind::signal) continue;
          if (!sig.delay) throw ConfigError("--realize needs a delay law on every signal");
          delays[i] = sig.delay->sample(rng);
        }
      }
      Trajectory traj = simulate_idm(sc.route, sc.vehicle, sc.idm, delays);
      traj.scenario_hash = scenario_hash(sc);
      traj.check_invariants();
      RunMetrics m = metrics(traj);
      if (!out_path.empty()) {
        ensure_parent(out_path);
        write_trajectory_csv(traj, fs::path(out_path));
      }
      if (!metrics_out.empty()) write_metrics_file(m, metrics_out);
      if (!plot_path.empty()) plot_trajectory(traj, plot_path);
      out << "scenario " << sc.name << " (hash " << traj.scenario_hash << ")\n";
      write_metrics_table(std::span<const RunMetrics>(&m, 1), nullptr, out);
      if (eta_flag) {
        if (!(*eta_flag >= 0.0 && *eta_flag <= 1.0)) throw CLI::ValidationError("--eta", "eta must lie in [0, 1]");
        const ViolationReport rep = monte_carlo_idm(sc.route, sc.vehicle, sc.idm, samples, seed, common.threads);
        out << "robust arrival (eta " << *eta_flag << " quantile over " << samples
            << " samples): " << std::fixed << std::setprecision(1) << rep.arrival_quantile(*eta_flag)
            << " s, mean fuel " << std::setprecision(2) << rep.mean_fuel() << " g\n"
            << std::defaultfloat;
      }
      return kSuccess;
    }

    if (app.got_subcommand(sweep_cmd)) {
      const std::vector<double> etas = parse_etas(etas_arg);
      const Scenario sc = resolve_scenario(scenario_arg);
      const Objective objective = resolve_objective(sc, objective_flag);
      if (!out_path.empty()) fs::create_directories(out_path);
      std::vector<RunMetrics> rows;
      std::vector<double> feasible_etas;
      std::ostringstream csv;
      csv << std::setprecision(17) << "# scenario_hash=" << scenario_hash(sc) << '\n'
          << "eta,feasible,arrival_time_s,total_fuel_g,avg_bsfc_gpkwh,arrival_norm,fuel_norm\n";
      std::optional<RunMetrics> reference;
      out << "eta    arrival (s)  fuel (g)  arrival/ref  fuel/ref\n";
      for (double e : etas) {
        try {
          const SolveResult r = solve_scenario(sc, objective, e, common);
          if (!reference) reference = r.metrics;
          const double an = r.metrics.arrival_time / reference->arrival_time;
          const double fn = r.metrics.total_fuel / reference->total_fuel;
          csv << e << ",1," << r.metrics.arrival_time << ',' << r.metrics.total_fuel << ','
              << r.metrics.avg_bsfc.value_or(0.0) << ',' << an << ',' << fn << '\n';
          out << std::fixed << std::setprecision(2) << std::setw(5) << e << "  " << std::setw(11)
              << std::setprecision(1) << r.metrics.arrival_time << "  " << std::setw(8) << std::setprecision(2)
              << r.metrics.total_fuel << "  " << std::setw(11) << std::setprecision(4) << an << "  "
              << std::setw(8) << fn << '\n'
              << std::defaultfloat;
          if (!out_path.empty()) {
            std::ostringstream name;
            name << "trajectory_eta" << e << ".csv";
            write_trajectory_csv(r.trajectory, fs::path(out_path) / name.str());
          }
          rows.push_back(r.metrics);
          feasible_etas.push_back(e);
        } catch (const Infeasible&) {
          csv << e << ",0,,,,,\n";
          out << std::fixed << std::setprecision(2) << std::setw(5) << e << "  infeasible\n" << std::defaultfloat;
        }
      }
      if (!out_path.empty()) {
        std::ofstream f(fs::path(out_path) / "sweep.csv");
        f << csv.str();
        std::ofstream mf(fs::path(out_path) / "metrics.csv");
        write_metrics_csv(rows, mf);
      }
      if (!plot_path.empty() && !rows.empty()) {
        PlotSeries arrival{"arrival / ref", feasible_etas, {}};
        PlotSeries fuel{"fuel / ref", feasible_etas, {}};
        for (const auto& m : rows) {
          arrival.y.push_back(m.arrival_time / rows.front().arrival_time);
          fuel.y.push_back(m.total_fuel / rows.front().total_fuel);
        }
        ensure_parent(plot_path);
        write_svg_plot(plot_path, sc.name + " eta sweep", "eta", "normalised value", {arrival, fuel});
      }
      if (rows.empty()) throw Infeasible("no eta in the sweep admits a feasible plan");
      return kSuccess;
    }

    if (app.got_subcommand(eval_cmd)) {
      const Scenario sc = resolve_scenario(scenario_arg);
      ViolationReport rep;
      if (!controller.empty()) {
        if (!trajectory_path.empty()) throw CLI::ValidationError("evaluate", "give a trajectory or --controller, not both");
        rep = monte_carlo_idm(sc.route, sc.vehicle, sc.idm, samples, seed, common.threads);
        out << "closed-loop idm on " << sc.name << '\n';
      } else {
        if (trajectory_path.empty()) throw CLI::ValidationError("evaluate", "a trajectory CSV or --controller is required");
        const Trajectory plan = read_trajectory_csv(fs::path(trajectory_path));
        const std::string hash = scenario_hash(sc);
        if (plan.scenario_hash != hash) {
          err << "warning: trajectory hash " << plan.scenario_hash << " differs from scenario hash " << hash << '\n';
        }
        rep = monte_carlo_violations(plan, sc.route, samples, seed, common.threads);
        out << "open-loop " << run_label(plan.method, plan.eta) << " on " << sc.name << '\n';
      }
      out << "samples " << samples << ", seed " << seed << '\n';
      print_violations(rep, out);
      if (!out_path.empty()) {
        fs::create_directories(out_path);
        std::ofstream v(fs::path(out_path) / "violations.csv");
        write_violation_csv(rep, v);
        std::ofstream h(fs::path(out_path) / "histogram.csv");
        write_histogram_csv(rep, h);
      }
      return kSuccess;
    }

    if (app.got_subcommand(table_cmd)) {
      std::vector<RunMetrics> runs;
      for (const auto& in : inputs) {
        auto loaded = load_runs(in);
        runs.insert(runs.end(), loaded.begin(), loaded.end());
      }
      if (runs.empty()) throw ConfigError("no runs found in the inputs");
      bool mixed = false;
      for (const auto& m : runs) mixed = mixed || m.scenario_hash != runs.front().scenario_hash;
      if (mixed) {
        err << "warning: runs come from different scenarios\n";
        for (const auto& m : runs) err << "  " << m.label << ": " << m.scenario_hash << '\n';
      }
      std::optional<ComparisonReport> comparison;
      if (runs.size() >= 2) {
        std::string base = baseline;
        if (base.empty()) {
          const bool has_time = std::any_of(runs.begin(), runs.end(), [](const RunMetrics& m) { return m.label == "op-time"; });
          base = has_time ? "op-time" : runs.front().label;
        }
        comparison = compare(runs, base);
      }
      write_metrics_table(runs, comparison ? &*comparison : nullptr, out);
      if (mixed) {
        for (const auto& m : runs) out << "  " << m.label << " scenario " << m.scenario_hash << '\n';
      }
      if (!out_path.empty()) {
        ensure_parent(out_path);
        std::ofstream f(out_path);
        write_metrics_csv(runs, f);
      }
      return kSuccess;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ScenarioError& e) {
    err << "scenario error at " << e.where() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace ecodrive::cli
