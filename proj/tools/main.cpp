#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mgdispatch/admm.hpp"
#include "mgdispatch/central.hpp"
#include "mgdispatch/config_io.hpp"
#include "mgdispatch/costs.hpp"
#include "mgdispatch/csv.hpp"
#include "mgdispatch/model.hpp"
#include "mgdispatch/qp.hpp"
#include "mgdispatch/windgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mgdispatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIterCap = 4;

// The central epigraph QP grows by 2*N_s*T rows; past this it stops being a
// sensible dense solve and the decentralized path should be used instead.
constexpr int kCentralScenarioCap = 500;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::string> solver;
  std::optional<int> ns;
  std::optional<int> mean_samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  std::optional<double> nu;
  std::optional<double> eps;
  std::optional<int> max_iters;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool with_solver_knobs) {
  cmd->add_option("--config", args.config_path, "problem/run configuration file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (default: $MGDISPATCH_OUT_DIR or .)");
  cmd->add_option("--ns", args.ns, "number of Monte Carlo scenarios");
  cmd->add_option("--mean-samples", args.mean_samples, "sample count for the wind means");
  cmd->add_option("--seed", args.seed, "random seed");
  if (with_solver_knobs) {
    cmd->add_option("--solver", args.solver, "admm | central | lmp");
    cmd->add_option("--rho", args.rho, "augmented Lagrangian penalty");
    cmd->add_option("--nu", args.nu, "dual stepsize");
    cmd->add_option("--eps", args.eps, "primal residual tolerance");
    cmd->add_option("--max-iters", args.max_iters, "iteration cap");
  }
}

fs::path resolve_out_dir(const CommonArgs& args) {
  fs::path dir;
  if (!args.out_dir.empty()) {
    dir = args.out_dir;
  } else if (const char* env = std::getenv("MGDISPATCH_OUT_DIR"); env && *env) {
    dir = env;
  } else {
    dir = ".";
  }
  fs::create_directories(dir);
  return dir;
}

RunConfig merge_run(const RunConfig& from_file, const CommonArgs& args) {
  RunConfig run = from_file;
  if (args.solver) run.solver = *args.solver;
  if (args.ns) run.n_scenarios = *args.ns;
  if (args.mean_samples) run.mean_samples = *args.mean_samples;
  if (args.seed) run.seed = *args.seed;
  if (args.rho) run.rho = *args.rho;
  if (args.nu) run.nu = *args.nu;
  if (args.eps) run.eps_res = *args.eps;
  if (args.max_iters) run.max_iters = *args.max_iters;
  return run;
}

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void write_summary(const fs::path& path, const DispatchProblem& problem, const RunConfig& run,
                   const NetCostReport& report, int iterations, double xi, bool converged,
                   double wall_seconds) {
  json s;
  s["solver"] = run.solver;
  s["seed"] = run.seed;
  s["n_scenarios"] = run.n_scenarios;
  s["mean_samples"] = run.mean_samples;
  s["rho"] = run.rho;
  s["nu"] = run.nu;
  s["eps_res"] = run.eps_res;
  s["max_iters"] = run.max_iters;
  s["iterations"] = iterations;
  s["xi_kwh"] = xi;
  s["converged"] = converged;
  s["generation_cost_cents"] = report.generation_cost;
  s["load_utility_cents"] = report.load_utility;
  s["transaction_cost_cents"] = report.transaction_cost;
  s["net_cost_cents"] = report.net_cost;
  s["alpha"] = vector_json(problem.prices.alpha);
  s["beta"] = vector_json(problem.prices.beta);
  s["wall_time_seconds"] = wall_seconds;
  std::ofstream out(path);
  out << s.dump(2) << "\n";
}

int cmd_solve(const CommonArgs& args) {
  auto [problem, run_file] = parse_config(args.config_path);
  const RunConfig run = merge_run(run_file, args);
  const fs::path out_dir = resolve_out_dir(args);

  if (run.solver == "central" && run.n_scenarios > kCentralScenarioCap) {
    std::cerr << "solve: the central solver is limited to --ns <= " << kCentralScenarioCap
              << " (dense epigraph QP); use --solver admm for larger scenario sets\n";
    return kExitConfig;
  }
  if (run.solver == "lmp") {
    problem.prices.beta = problem.prices.alpha;  // LMP pricing: one price both ways
  }

  const auto t0 = std::chrono::steady_clock::now();
  ScenarioSet scenarios =
      build_scenarios(problem, run.n_scenarios, run.seed, run.mean_samples, /*keep_per_farm=*/false);

  Schedule schedule;
  int iterations = 0;
  double xi = 0.0;
  bool converged = true;

  try {
    if (run.solver == "admm") {
      AdmmConfig config;
      config.rho = run.rho;
      config.nu = run.nu;
      config.eps_res = run.eps_res;
      config.max_iters = run.max_iters;
      const AdmmResult result = run_admm(problem, scenarios, config);
      schedule = result.schedule;
      iterations = result.state.k;
      xi = result.state.xi;
      converged = result.converged;
      write_trace_csv(out_dir / "trace.csv", result.state.trace, problem.horizon);
    } else if (run.solver == "central") {
      const CentralResult result = solve_central_saa(problem, scenarios);
      schedule = result.schedule;
      iterations = result.qp.iterations;
      xi = primal_residual(schedule.p_g, schedule.p_d, schedule.p_r, problem.fixed_demand);
    } else if (run.solver == "lmp") {
      const CentralResult result = solve_central_lmp(problem, scenarios.means);
      schedule = result.schedule;
      iterations = result.qp.iterations;
      xi = primal_residual(schedule.p_g, schedule.p_d, schedule.p_r, problem.fixed_demand);
    } else {
      std::cerr << "solve: unknown solver '" << run.solver << "'\n";
      return kExitConfig;
    }
  } catch (const SolverFailure& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return e.status() == QpStatus::max_iter ? kExitIterCap : kExitSolver;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const NetCostReport report = net_cost(schedule, problem, scenarios);
  write_schedule_csv(out_dir / "schedule.csv", schedule);
  write_summary(out_dir / "summary.json", problem, run, report, iterations, xi, converged, wall);

  std::cout << "solver=" << run.solver << " iterations=" << iterations
            << " xi=" << format_double(xi) << " net_cost=" << format_double(report.net_cost)
            << " out=" << out_dir.string() << "\n";
  if (!converged) {
    std::cerr << "solve: iteration cap reached before the primal residual dropped below "
              << run.eps_res << "\n";
    return kExitIterCap;
  }
  return kExitOk;
}

int cmd_sweep_price_ratio(const CommonArgs& args, const std::vector<double>& ratios) {
  auto [problem, run_file] = parse_config(args.config_path);
  const RunConfig run = merge_run(run_file, args);
  const fs::path out_dir = resolve_out_dir(args);

  if (run.solver == "lmp") {
    std::cerr << "sweep-price-ratio: lmp applies only to ratio 1.0; use admm or central\n";
    return kExitConfig;
  }
  if (run.solver == "central" && run.n_scenarios > kCentralScenarioCap) {
    std::cerr << "sweep-price-ratio: the central solver is limited to --ns <= "
              << kCentralScenarioCap << "\n";
    return kExitConfig;
  }

  // Purchase prices at five times the base schedule; one shared scenario set
  // across all ratios so rows differ only through beta.
  problem.prices.alpha *= 5.0;
  const ScenarioSet scenarios =
      build_scenarios(problem, run.n_scenarios, run.seed, run.mean_samples, /*keep_per_farm=*/false);

  std::ofstream csv(out_dir / "sweep.csv");
  if (!csv) {
    std::cerr << "sweep-price-ratio: cannot write to " << (out_dir / "sweep.csv").string() << "\n";
    return kExitConfig;
  }
  csv << "ratio,net_cost,generation_cost,utility,transaction_cost\n";
  csv.flush();

  for (const double ratio : ratios) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
      std::cerr << "sweep-price-ratio: ratio " << ratio << " outside [0,1]\n";
      return kExitConfig;
    }
    DispatchProblem scaled = problem;
    scaled.prices.beta = ratio * problem.prices.alpha;
    Schedule schedule;
    try {
      if (run.solver == "admm") {
        AdmmConfig config;
        config.rho = run.rho;
        config.nu = run.nu;
        config.eps_res = run.eps_res;
        config.max_iters = run.max_iters;
        const AdmmResult result = run_admm(scaled, scenarios, config);
        if (!result.converged) {
          std::cerr << "sweep-price-ratio: ratio " << ratio
                    << " hit the iteration cap; partial sweep.csv preserved\n";
          return kExitIterCap;
        }
        schedule = result.schedule;
      } else {
        schedule = solve_central_saa(scaled, scenarios).schedule;
      }
    } catch (const SolverFailure& e) {
      std::cerr << "sweep-price-ratio: ratio " << ratio << ": " << e.what()
                << "; partial sweep.csv preserved\n";
      return e.status() == QpStatus::max_iter ? kExitIterCap : kExitSolver;
    }
    const NetCostReport report = net_cost(schedule, scaled, scenarios);
    csv << format_double(ratio) << ',' << format_double(report.net_cost) << ','
        << format_double(report.generation_cost) << ',' << format_double(report.load_utility)
        << ',' << format_double(report.transaction_cost) << '\n';
    csv.flush();
    std::cout << "ratio=" << format_double(ratio)
              << " net_cost=" << format_double(report.net_cost) << "\n";
  }
  std::cout << "sweep written to " << (out_dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

int cmd_sample_wind(const CommonArgs& args) {
  auto [problem, run_file] = parse_config(args.config_path);
  const RunConfig run = merge_run(run_file, args);
  const fs::path out_dir = resolve_out_dir(args);

  const ScenarioSet scenarios =
      build_scenarios(problem, run.n_scenarios, run.seed, run.mean_samples, /*keep_per_farm=*/true);
  write_scenarios_csv(out_dir / "scenarios.csv", scenarios);
  write_means_csv(out_dir / "means.csv", scenarios);
  std::cout << "wrote " << run.n_scenarios << " scenarios to "
            << (out_dir / "scenarios.csv").string() << " and means to "
            << (out_dir / "means.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"day-ahead economic dispatch for a wind-integrated microgrid"};
  app.require_subcommand(1);

  CommonArgs solve_args, sweep_args, wind_args;
  std::vector<double> ratios{0.2, 0.4, 0.6, 0.8, 1.0};

  CLI::App* solve = app.add_subcommand("solve", "solve one dispatch instance");
  add_common_flags(solve, solve_args, /*with_solver_knobs=*/true);

  CLI::App* sweep = app.add_subcommand(
      "sweep-price-ratio", "net cost versus selling-to-purchase price ratio (5x base prices)");
  add_common_flags(sweep, sweep_args, /*with_solver_knobs=*/true);
  sweep->add_option("--ratios", ratios, "selling/purchase ratios to sweep")->delimiter(',');

  CLI::App* wind = app.add_subcommand("sample-wind", "emit wind power scenarios and means as CSV");
  add_common_flags(wind, wind_args, /*with_solver_knobs=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (sweep->parsed()) return cmd_sweep_price_ratio(sweep_args, ratios);
    if (wind->parsed()) return cmd_sample_wind(wind_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
