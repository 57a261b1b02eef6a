#pragma once

#include <Eigen/Core>

#include "mgdispatch/model.hpp"
#include "mgdispatch/qp.hpp"
#include "mgdispatch/windgen.hpp"

namespace mgdispatch {

struct CentralResult {
  Schedule schedule;
  double objective = 0.0;  // ¢, includes the constant mean-price term
  QpSolution qp;
};

// Solves the full sample-average dispatch program as one quadratic program,
// with the absolute deviations lifted into epigraph variables (two linear
// inequalities per scenario and slot). The independent reference solution
// the decentralized solver is validated against.
CentralResult solve_central_saa(const DispatchProblem& problem, const ScenarioSet& scenarios,
                                double tol = 1e-8);

// Equal purchase/selling price special case: the stochastic term collapses
// to a mean-value linear term, leaving a plain QP. Requires alpha == beta
// slotwise; mean_wind is the I x T matrix of per-slot expected wind power.
CentralResult solve_central_lmp(const DispatchProblem& problem, const Eigen::MatrixXd& mean_wind,
                                double tol = 1e-8);

}  // namespace mgdispatch
