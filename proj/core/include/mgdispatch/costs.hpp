#pragma once

#include <Eigen/Core>
#include <utility>

#include "mgdispatch/model.hpp"
#include "mgdispatch/windgen.hpp"

namespace mgdispatch {

struct NetCostReport {
  double generation_cost = 0.0;  // ¢
  double load_utility = 0.0;     // ¢
  double transaction_cost = 0.0; // ¢
  double net_cost = 0.0;         // generation - utility + transaction
};

double gen_cost(const GeneratorParams& g, double p);
double gen_cost(const GeneratorParams& g, int t, double p);

double load_utility(const LoadParams& l, double p);
double load_utility(const LoadParams& l, int t, double p);

// Half-spread and mid prices: delta[t] = (alpha-beta)/2, gamma[t] = (alpha+beta)/2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> delta_gamma(const PriceSchedule& prices);

// Transaction cost of one realized trajectory: shortfall bought at alpha,
// surplus sold at beta.
double transaction_cost_sample(const Eigen::VectorXd& p_r, const Eigen::VectorXd& aggregate_w,
                               const PriceSchedule& prices);

// Sample-average transaction cost: the absolute-value spread term averages
// over the scenario set while the mid-price term uses the independently
// drawn per-slot means stored in the set.
double saa_transaction_cost(const Eigen::VectorXd& p_r, const ScenarioSet& scenarios,
                            const PriceSchedule& prices);

NetCostReport net_cost(const Schedule& schedule, const DispatchProblem& problem,
                       const ScenarioSet& scenarios);

// Numerically stable deterministic reduction used for the scenario sums.
double pairwise_sum(const double* data, std::ptrdiff_t n);

}  // namespace mgdispatch
