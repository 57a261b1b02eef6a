#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mgdispatch/model.hpp"

namespace mgdispatch {

// Monte Carlo wind-power scenarios plus the independently drawn sample means
// that enter the averaged price term of the transaction-cost estimator.
struct ScenarioSet {
  Eigen::MatrixXd aggregate;            // N_s x T, entry (s,t) = sum_i W_i^t(s)
  std::vector<Eigen::MatrixXd> per_farm;  // N_s matrices of shape I x T; may be empty
  Eigen::MatrixXd means;                // I x T sample-average wind power
  std::uint64_t seed = 0;
  int n_samples = 0;

  bool has_per_farm() const { return !per_farm.empty(); }
};

// Correlated wind-speed trajectories: per farm a stationary AR(1) latent
// Gaussian process with cross-farm innovation correlation `corr`, mapped to
// Weibull marginals through the inverse CDF. Returns n matrices of shape
// I x T. Deterministic given (farms, corr, T, n, seed).
std::vector<Eigen::MatrixXd> sample_wind_speeds(const std::vector<WindFarmParams>& farms,
                                                const Eigen::MatrixXd& corr, int T, int n,
                                                std::uint64_t seed);

// Piecewise-linear turbine curve: 0 below cut-in and at/after cut-out,
// rated power between rated and cut-out, linear in between.
double power_curve(double v, const WindFarmParams& farm);

// Samples `n_samples` power scenarios and fills the per-slot means from an
// independent `mean_samples`-sized draw.
ScenarioSet build_scenarios(const DispatchProblem& problem, int n_samples, std::uint64_t seed,
                            int mean_samples, bool keep_per_farm = true);

}  // namespace mgdispatch
