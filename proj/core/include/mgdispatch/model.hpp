#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mgdispatch {

// Conventions used throughout the library:
//   * energies are kWh per scheduling slot,
//   * prices/costs are cents (¢) and ¢/kWh,
//   * slots are 0-based in code and 1-based in diagnostics and CSV output.

struct GeneratorParams {
  double p_min = 0.0;  // kWh/slot
  double p_max = 0.0;
  double ramp_up = 0.0;
  double ramp_down = 0.0;
  double a = 0.0;  // quadratic cost coefficient, ¢/(kWh)^2
  double b = 0.0;  // linear cost coefficient, ¢/kWh
  // Optional per-slot coefficient schedules. Empty means time-invariant a/b.
  std::vector<double> a_by_slot;
  std::vector<double> b_by_slot;

  double quad_coeff(int t) const { return a_by_slot.empty() ? a : a_by_slot[static_cast<size_t>(t)]; }
  double lin_coeff(int t) const { return b_by_slot.empty() ? b : b_by_slot[static_cast<size_t>(t)]; }
};

struct LoadParams {
  double p_min = 0.0;  // kWh/slot
  double p_max = 0.0;
  double c = 0.0;  // utility curvature, ¢/(kWh)^2 (concave: c <= 0)
  double d = 0.0;  // marginal utility, ¢/kWh
  std::vector<double> c_by_slot;
  std::vector<double> d_by_slot;

  double quad_coeff(int t) const { return c_by_slot.empty() ? c : c_by_slot[static_cast<size_t>(t)]; }
  double lin_coeff(int t) const { return d_by_slot.empty() ? d : d_by_slot[static_cast<size_t>(t)]; }
};

struct WindFarmParams {
  double weibull_shape = 2.0;   // dimensionless, > 0
  double weibull_scale = 8.0;   // m/s, > 0
  double v_cut_in = 3.0;        // m/s
  double v_rated = 11.0;        // m/s
  double v_cut_out = 25.0;      // m/s
  double p_rated = 20.0;        // kWh/slot
  double ar_coeff = 0.7;        // lag-1 coefficient of the latent process, in [0,1)
};

struct PriceSchedule {
  Eigen::VectorXd alpha;  // purchase price per slot, ¢/kWh
  Eigen::VectorXd beta;   // selling price per slot, ¢/kWh
};

// A full day-ahead dispatch instance.
struct DispatchProblem {
  std::vector<GeneratorParams> generators;
  std::vector<LoadParams> loads;
  std::vector<WindFarmParams> wind_farms;
  Eigen::MatrixXd farm_correlation;   // I x I, latent-Gaussian domain
  Eigen::VectorXd fixed_demand;       // L, length T
  Eigen::VectorXd spinning_reserve;   // SR, length T
  PriceSchedule prices;
  double p_r_min = 0.0;               // bounds on committed wind, kWh/slot
  double p_r_max = 0.0;
  Eigen::VectorXd initial_gen;        // ramp anchor for the first slot, length M
  int horizon = 0;                    // T

  int num_generators() const { return static_cast<int>(generators.size()); }
  int num_loads() const { return static_cast<int>(loads.size()); }
  int num_farms() const { return static_cast<int>(wind_farms.size()); }
  double total_gen_capacity() const;
};

struct Schedule {
  Eigen::MatrixXd p_g;  // M x T
  Eigen::MatrixXd p_d;  // N x T
  Eigen::VectorXd p_r;  // length T
};

struct Violation {
  std::string path;     // e.g. "generators[2].p_min"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks every structural invariant of the instance and reports all
// violations found (it never throws).
ValidationReport validate_problem(const DispatchProblem& problem);

// The built-in 3-generator / 3-load / 4-wind-farm, T=8 case study.
DispatchProblem builtin_case_study();

}  // namespace mgdispatch
