#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mgdispatch/admm.hpp"
#include "mgdispatch/costs.hpp"
#include "mgdispatch/model.hpp"
#include "mgdispatch/piecewise_prox.hpp"
#include "mgdispatch/qp.hpp"
#include "mgdispatch/windgen.hpp"

using namespace mgdispatch;

namespace {

QpProblem random_box_qp(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = normal(rng);
  QpProblem p;
  p.Q = B.transpose() * B / n;
  p.Q.diagonal().array() += 0.1;
  p.q.resize(n);
  for (int i = 0; i < n; ++i) p.q[i] = normal(rng);
  p.eq_mat.resize(0, n);
  p.eq_rhs.resize(0);
  p.ineq_mat.resize(0, n);
  p.ineq_rhs.resize(0);
  p.lower = Eigen::VectorXd::Constant(n, -1.0);
  p.upper = Eigen::VectorXd::Constant(n, 1.0);
  return p;
}

void bm_qp_box(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const QpProblem p = random_box_qp(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_qp(p, 1e-8));
  }
}
BENCHMARK(bm_qp_box)->Arg(24)->Arg(96)->Arg(240);

void bm_prox_slot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 80.0);
  std::vector<double> breakpoints(static_cast<size_t>(n));
  for (auto& b : breakpoints) b = unit(rng);
  std::sort(breakpoints.begin(), breakpoints.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(piecewise_prox_1d_sorted_uniform(
        breakpoints, 0.85 / n, 7.65, 1.0, 45.0, 0.0, 60.0));
  }
}
BENCHMARK(bm_prox_slot)->Arg(50)->Arg(1000)->Arg(10000);

void bm_scenario_build(benchmark::State& state) {
  const DispatchProblem problem = builtin_case_study();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_scenarios(problem, n, 1, n, /*keep_per_farm=*/false));
  }
}
BENCHMARK(bm_scenario_build)->Arg(1000)->Arg(20000);

void bm_admm_case_study(benchmark::State& state) {
  const DispatchProblem problem = builtin_case_study();
  const ScenarioSet scenarios = build_scenarios(problem, 1000, 1, 1000, false);
  AdmmConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_admm(problem, scenarios, config));
  }
}
BENCHMARK(bm_admm_case_study)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
