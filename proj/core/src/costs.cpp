#include "mgdispatch/costs.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mgdispatch {

double gen_cost(const GeneratorParams& g, double p) { return g.a * p * p + g.b * p; }

double gen_cost(const GeneratorParams& g, int t, double p) {
  return g.quad_coeff(t) * p * p + g.lin_coeff(t) * p;
}

double load_utility(const LoadParams& l, double p) { return l.c * p * p + l.d * p; }

double load_utility(const LoadParams& l, int t, double p) {
  return l.quad_coeff(t) * p * p + l.lin_coeff(t) * p;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> delta_gamma(const PriceSchedule& prices) {
  Eigen::VectorXd delta = 0.5 * (prices.alpha - prices.beta);
  Eigen::VectorXd gamma = 0.5 * (prices.alpha + prices.beta);
  return {std::move(delta), std::move(gamma)};
}

double transaction_cost_sample(const Eigen::VectorXd& p_r, const Eigen::VectorXd& aggregate_w,
                               const PriceSchedule& prices) {
  const Eigen::Index T = p_r.size();
  if (aggregate_w.size() != T || prices.alpha.size() != T || prices.beta.size() != T)
    throw std::invalid_argument("transaction_cost_sample: length mismatch");
  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double gap = p_r[t] - aggregate_w[t];
    total += prices.alpha[t] * std::max(gap, 0.0) - prices.beta[t] * std::max(-gap, 0.0);
  }
  return total;
}

double pairwise_sum(const double* data, std::ptrdiff_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::ptrdiff_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::ptrdiff_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double saa_transaction_cost(const Eigen::VectorXd& p_r, const ScenarioSet& scenarios,
                            const PriceSchedule& prices) {
  const Eigen::Index T = p_r.size();
  if (scenarios.aggregate.cols() != T || prices.alpha.size() != T)
    throw std::invalid_argument("saa_transaction_cost: length mismatch");
  const auto [delta, gamma] = delta_gamma(prices);
  const Eigen::Index n_s = scenarios.aggregate.rows();

  std::vector<double> per_scenario(static_cast<size_t>(n_s));
  for (Eigen::Index s = 0; s < n_s; ++s) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < T; ++t)
      acc += delta[t] * std::abs(p_r[t] - scenarios.aggregate(s, t));
    per_scenario[static_cast<size_t>(s)] = acc;
  }
  const double spread_term =
      pairwise_sum(per_scenario.data(), static_cast<std::ptrdiff_t>(n_s)) / static_cast<double>(n_s);

  double mid_term = 0.0;
  const Eigen::VectorXd mean_totals = scenarios.means.colwise().sum();
  for (Eigen::Index t = 0; t < T; ++t) mid_term += gamma[t] * (p_r[t] - mean_totals[t]);
  return spread_term + mid_term;
}

NetCostReport net_cost(const Schedule& schedule, const DispatchProblem& problem,
                       const ScenarioSet& scenarios) {
  const int M = problem.num_generators();
  const int N = problem.num_loads();
  const int T = problem.horizon;
  if (schedule.p_g.rows() != M || schedule.p_g.cols() != T)
    throw std::invalid_argument("net_cost: p_g must be M x T");
  if (schedule.p_d.rows() != N || schedule.p_d.cols() != T)
    throw std::invalid_argument("net_cost: p_d must be N x T");
  if (schedule.p_r.size() != T) throw std::invalid_argument("net_cost: p_r must have length T");

  NetCostReport report;
  for (int t = 0; t < T; ++t) {
    for (int m = 0; m < M; ++m)
      report.generation_cost += gen_cost(problem.generators[static_cast<size_t>(m)], t, schedule.p_g(m, t));
    for (int n = 0; n < N; ++n)
      report.load_utility += load_utility(problem.loads[static_cast<size_t>(n)], t, schedule.p_d(n, t));
  }
  report.transaction_cost = saa_transaction_cost(schedule.p_r, scenarios, problem.prices);
  report.net_cost = report.generation_cost - report.load_utility + report.transaction_cost;
  return report;
}

}  // namespace mgdispatch
