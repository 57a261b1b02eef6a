#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mgdispatch/config_io.hpp"
#include "mgdispatch/costs.hpp"
#include "mgdispatch/csv.hpp"
#include "mgdispatch/windgen.hpp"
#include "support/cli_runner.hpp"

using namespace mgdispatch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kBin = MGDISPATCH_CLI_BIN;
const std::string kConfig = MGDISPATCH_CASE_STUDY_JSON;

std::string quiet(const fs::path& dir) {
  return " >" + (dir / "stdout.txt").string() + " 2>" + (dir / "stderr.txt").string();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve with the decentralized solver converges and ties out") {
  const fs::path dir = testutil::make_temp_dir("solve");
  const int rc = testutil::run_command(kBin + " solve --config " + kConfig +
                                       " --ns 100 --mean-samples 2000 --seed 1 --out " +
                                       dir.string() + quiet(dir));
  REQUIRE(rc == 0);

  const json summary = json::parse(testutil::slurp(dir / "summary.json"));
  CHECK(summary["solver"] == "admm");
  CHECK(summary["converged"] == true);
  CHECK(summary["xi_kwh"].get<double>() <= 1e-2);

  // Trace ends at the reported residual.
  const auto trace = read_lines(dir / "trace.csv");
  REQUIRE(trace.size() >= 2);
  CHECK(trace[0].rfind("iter,net_cost_cents,xi_kwh,lambda_t1", 0) == 0);
  const auto last = trace.back();
  const auto first_comma = last.find(',');
  const auto second_comma = last.find(',', first_comma + 1);
  const auto third_comma = last.find(',', second_comma + 1);
  const double final_xi = std::stod(last.substr(second_comma + 1, third_comma - second_comma - 1));
  CHECK(final_xi <= 1e-2);
  CHECK(final_xi == doctest::Approx(summary["xi_kwh"].get<double>()).epsilon(1e-12));

  // The emitted schedule reproduces the summary's net cost exactly.
  auto [problem, run] = parse_config(kConfig);
  const ScenarioSet scenarios = build_scenarios(problem, 100, 1, 2000, false);
  const Schedule schedule = read_schedule_csv(dir / "schedule.csv", 3, 3, 8);
  const NetCostReport report = net_cost(schedule, problem, scenarios);
  CHECK(std::abs(report.net_cost - summary["net_cost_cents"].get<double>()) <= 1e-9);
}

TEST_CASE("identical invocations produce byte-identical csv outputs") {
  const fs::path a = testutil::make_temp_dir("det_a");
  const fs::path b = testutil::make_temp_dir("det_b");
  const std::string flags =
      " solve --config " + kConfig + " --ns 60 --mean-samples 500 --seed 3 --out ";
  REQUIRE(testutil::run_command(kBin + flags + a.string() + quiet(a)) == 0);
  REQUIRE(testutil::run_command(kBin + flags + b.string() + quiet(b)) == 0);
  CHECK(testutil::slurp(a / "schedule.csv") == testutil::slurp(b / "schedule.csv"));
  CHECK(testutil::slurp(a / "trace.csv") == testutil::slurp(b / "trace.csv"));
  CHECK(!testutil::slurp(a / "schedule.csv").empty());
}

TEST_CASE("lmp solve echoes alpha into beta") {
  const fs::path dir = testutil::make_temp_dir("lmp");
  const int rc = testutil::run_command(kBin + " solve --config " + kConfig +
                                       " --solver lmp --ns 20 --mean-samples 500 --seed 2 --out " +
                                       dir.string() + quiet(dir));
  REQUIRE(rc == 0);
  const json summary = json::parse(testutil::slurp(dir / "summary.json"));
  const auto alpha = summary["alpha"].get<std::vector<double>>();
  const auto beta = summary["beta"].get<std::vector<double>>();
  CHECK(alpha == beta);
  CHECK(!fs::exists(dir / "trace.csv"));  // no iterative trace for one-shot QP
}

TEST_CASE("central and decentralized runs agree on a shared scenario set") {
  const fs::path c = testutil::make_temp_dir("oracle_c");
  const fs::path a = testutil::make_temp_dir("oracle_a");
  REQUIRE(testutil::run_command(kBin + " solve --config " + kConfig +
                                " --solver central --ns 50 --mean-samples 1000 --seed 1 --out " +
                                c.string() + quiet(c)) == 0);
  REQUIRE(testutil::run_command(kBin + " solve --config " + kConfig +
                                " --solver admm --eps 1e-4 --max-iters 3000 --ns 50"
                                " --mean-samples 1000 --seed 1 --out " +
                                a.string() + quiet(a)) == 0);
  const double net_c =
      json::parse(testutil::slurp(c / "summary.json"))["net_cost_cents"].get<double>();
  const double net_a =
      json::parse(testutil::slurp(a / "summary.json"))["net_cost_cents"].get<double>();
  CHECK(std::abs(net_c - net_a) / std::max(1.0, std::abs(net_c)) <= 1e-3);
}

TEST_CASE("sample-wind emits deterministic scenario and mean tables") {
  const fs::path a = testutil::make_temp_dir("wind_a");
  const fs::path b = testutil::make_temp_dir("wind_b");
  const std::string flags =
      " sample-wind --config " + kConfig + " --ns 2 --mean-samples 50 --seed 7 --out ";
  REQUIRE(testutil::run_command(kBin + flags + a.string() + quiet(a)) == 0);
  REQUIRE(testutil::run_command(kBin + flags + b.string() + quiet(b)) == 0);

  const auto scenarios = read_lines(a / "scenarios.csv");
  CHECK(scenarios.size() == 1 + 2 * 8 * 4);  // header + ns*T*I rows
  CHECK(scenarios[0] == "scenario,slot,farm,power_kwh");
  const auto means = read_lines(a / "means.csv");
  CHECK(means.size() == 1 + 8 * 4);
  CHECK(means[0] == "slot,farm,mean_kwh");

  CHECK(testutil::slurp(a / "scenarios.csv") == testutil::slurp(b / "scenarios.csv"));
  CHECK(testutil::slurp(a / "means.csv") == testutil::slurp(b / "means.csv"));
}

TEST_CASE("price ratio sweep decreases net cost and preserves format") {
  const fs::path dir = testutil::make_temp_dir("sweep");
  const int rc = testutil::run_command(kBin + " sweep-price-ratio --config " + kConfig +
                                       " --ns 60 --mean-samples 1000 --seed 1 --eps 1e-3"
                                       " --max-iters 2000 --ratios 0.2,1.0 --out " +
                                       dir.string() + quiet(dir));
  REQUIRE(rc == 0);
  const auto lines = read_lines(dir / "sweep.csv");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "ratio,net_cost,generation_cost,utility,transaction_cost");
  const auto parse_row = [](const std::string& line) {
    std::vector<double> row;
    std::istringstream s(line);
    std::string field;
    while (std::getline(s, field, ',')) row.push_back(std::stod(field));
    return row;
  };
  const auto r02 = parse_row(lines[1]);
  const auto r10 = parse_row(lines[2]);
  CHECK(r02[0] == doctest::Approx(0.2));
  CHECK(r10[0] == doctest::Approx(1.0));
  CHECK(r10[1] < r02[1]);       // net cost falls with the selling ratio
  CHECK(r10[2] >= r02[2] - 1e-9);  // generation cost does not fall
}

TEST_CASE("sweep at ratio one matches the lmp solver on the scaled prices") {
  const fs::path dir = testutil::make_temp_dir("sweep_lmp");
  REQUIRE(testutil::run_command(kBin + " sweep-price-ratio --config " + kConfig +
                                " --ns 50 --mean-samples 1000 --seed 1 --eps 1e-4"
                                " --max-iters 3000 --ratios 1.0 --out " +
                                dir.string() + quiet(dir)) == 0);
  const auto lines = read_lines(dir / "sweep.csv");
  REQUIRE(lines.size() == 2);
  const double sweep_net = std::stod(lines[1].substr(lines[1].find(',') + 1));

  // Same instance with the purchase prices scaled by hand: alpha *= 5.
  auto [problem, run] = parse_config(kConfig);
  problem.prices.alpha *= 5.0;
  problem.prices.beta = problem.prices.alpha;
  const fs::path scaled_config = dir / "scaled.json";
  std::ofstream(scaled_config) << config_to_json(problem, run);
  const fs::path lmp_dir = testutil::make_temp_dir("sweep_lmp_ref");
  REQUIRE(testutil::run_command(kBin + " solve --solver lmp --config " + scaled_config.string() +
                                " --ns 50 --mean-samples 1000 --seed 1 --out " + lmp_dir.string() +
                                quiet(lmp_dir)) == 0);
  const double lmp_net =
      json::parse(testutil::slurp(lmp_dir / "summary.json"))["net_cost_cents"].get<double>();
  CHECK(std::abs(sweep_net - lmp_net) / std::max(1.0, std::abs(lmp_net)) <= 1e-3);
}

TEST_CASE("env var supplies the default output directory") {
  const fs::path dir = testutil::make_temp_dir("envout");
  const int rc = testutil::run_command("MGDISPATCH_OUT_DIR=" + dir.string() + " " + kBin +
                                       " sample-wind --config " + kConfig +
                                       " --ns 1 --mean-samples 10 --seed 1" + quiet(dir));
  REQUIRE(rc == 0);
  CHECK(fs::exists(dir / "scenarios.csv"));
  CHECK(fs::exists(dir / "means.csv"));
}

TEST_CASE("exit codes distinguish config, solver, and cap failures") {
  const fs::path dir = testutil::make_temp_dir("codes");

  CHECK(testutil::run_command(kBin + " solve --config /nonexistent.json --out " + dir.string() +
                              quiet(dir)) == 2);

  // Invalid prices: beta above alpha.
  auto [problem, run] = parse_config(kConfig);
  problem.prices.beta[4] = 9.0;
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << config_to_json(problem, run);
  const int rc_bad = testutil::run_command(kBin + " solve --config " + bad.string() + " --out " +
                                           dir.string() + quiet(dir));
  CHECK(rc_bad == 2);
  const std::string err = testutil::slurp(dir / "stderr.txt");
  CHECK(err.find("beta exceeds alpha at slot 5") != std::string::npos);

  // Central guard on giant epigraph programs.
  CHECK(testutil::run_command(kBin + " solve --config " + kConfig +
                              " --solver central --ns 1000 --out " + dir.string() + quiet(dir)) == 2);

  // Iteration cap surfaces as exit 4.
  CHECK(testutil::run_command(kBin + " solve --config " + kConfig +
                              " --ns 20 --mean-samples 100 --max-iters 1 --out " + dir.string() +
                              quiet(dir)) == 4);
}

TEST_CASE("flags override the run block in the config file") {
  const fs::path dir = testutil::make_temp_dir("override");
  const int rc = testutil::run_command(kBin + " solve --config " + kConfig +
                                       " --ns 25 --mean-samples 200 --seed 9 --rho 2.0 --nu 0.25"
                                       " --out " + dir.string() + quiet(dir));
  REQUIRE(rc == 0);
  const json summary = json::parse(testutil::slurp(dir / "summary.json"));
  CHECK(summary["n_scenarios"] == 25);
  CHECK(summary["seed"] == 9);
  CHECK(summary["rho"] == 2.0);
  CHECK(summary["nu"] == 0.25);
}

}  // TEST_SUITE
