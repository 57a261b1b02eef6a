#include "mgdispatch/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace mgdispatch {

double DispatchProblem::total_gen_capacity() const {
  double s = 0.0;
  for (const auto& g : generators) s += g.p_max;
  return s;
}

std::string ValidationReport::to_string() const {
  if (violations.empty()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) os << v.path << ": " << v.message << "\n";
  return os.str();
}

namespace {

void add(ValidationReport& r, std::string path, std::string msg) {
  r.violations.push_back({std::move(path), std::move(msg)});
}

std::string at(const std::string& base, int i) {
  return base + "[" + std::to_string(i) + "]";
}

void check_coeff_schedule(ValidationReport& r, const std::string& path,
                          const std::vector<double>& sched, int horizon) {
  if (!sched.empty() && static_cast<int>(sched.size()) != horizon) {
    add(r, path, "per-slot schedule must have length T=" + std::to_string(horizon));
  }
}

void check_generator(ValidationReport& r, const GeneratorParams& g, int idx, int horizon) {
  const std::string base = at("generators", idx);
  if (!(g.p_min >= 0.0)) add(r, base + ".p_min", "must be >= 0");
  if (!(g.p_min <= g.p_max)) add(r, base + ".p_max", "must satisfy p_min <= p_max");
  if (!(g.ramp_up > 0.0)) add(r, base + ".ramp_up", "must be > 0");
  if (!(g.ramp_down > 0.0)) add(r, base + ".ramp_down", "must be > 0");
  check_coeff_schedule(r, base + ".a_by_slot", g.a_by_slot, horizon);
  check_coeff_schedule(r, base + ".b_by_slot", g.b_by_slot, horizon);
  const int slots = g.a_by_slot.empty() && g.b_by_slot.empty() ? 1 : horizon;
  for (int t = 0; t < slots; ++t) {
    const double aq = g.quad_coeff(t), bl = g.lin_coeff(t);
    if (!(aq >= 0.0)) add(r, base + ".a", "cost curvature must be >= 0");
    if (!(bl + 2.0 * aq * g.p_min >= 0.0))
      add(r, base + ".b", "cost must be increasing on the feasible range (b + 2*a*p_min >= 0)");
  }
}

void check_load(ValidationReport& r, const LoadParams& l, int idx, int horizon) {
  const std::string base = at("loads", idx);
  if (!(l.p_min >= 0.0)) add(r, base + ".p_min", "must be >= 0");
  if (!(l.p_min <= l.p_max)) add(r, base + ".p_max", "must satisfy p_min <= p_max");
  check_coeff_schedule(r, base + ".c_by_slot", l.c_by_slot, horizon);
  check_coeff_schedule(r, base + ".d_by_slot", l.d_by_slot, horizon);
  const int slots = l.c_by_slot.empty() ? 1 : horizon;
  for (int t = 0; t < slots; ++t) {
    if (!(l.quad_coeff(t) <= 0.0)) add(r, base + ".c", "utility curvature must be <= 0");
  }
}

void check_wind_farm(ValidationReport& r, const WindFarmParams& w, int idx) {
  const std::string base = at("wind_farms", idx);
  if (!(w.weibull_shape > 0.0)) add(r, base + ".weibull_shape", "must be > 0");
  if (!(w.weibull_scale > 0.0)) add(r, base + ".weibull_scale", "must be > 0");
  if (!(w.v_cut_in >= 0.0)) add(r, base + ".v_cut_in", "must be >= 0");
  if (!(w.v_cut_in < w.v_rated)) add(r, base + ".v_rated", "must satisfy v_cut_in < v_rated");
  if (!(w.v_rated < w.v_cut_out)) add(r, base + ".v_cut_out", "must satisfy v_rated < v_cut_out");
  if (!(w.p_rated > 0.0)) add(r, base + ".p_rated", "must be > 0");
  if (!(w.ar_coeff >= 0.0 && w.ar_coeff < 1.0)) add(r, base + ".ar_coeff", "must lie in [0,1)");
}

void check_correlation(ValidationReport& r, const Eigen::MatrixXd& corr, int n_farms) {
  if (corr.rows() != n_farms || corr.cols() != n_farms) {
    add(r, "farm_correlation", "must be an IxI matrix matching the number of wind farms");
    return;
  }
  if (n_farms == 0) return;
  if (!corr.isApprox(corr.transpose(), 1e-12)) {
    add(r, "farm_correlation", "must be symmetric");
    return;
  }
  for (int i = 0; i < n_farms; ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-12)
      add(r, "farm_correlation", "diagonal entries must equal 1 (entry " + std::to_string(i) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) {
    add(r, "farm_correlation", "must be positive semidefinite (min eigenvalue " +
                                   std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
}

}  // namespace

ValidationReport validate_problem(const DispatchProblem& p) {
  ValidationReport r;
  const int T = p.horizon;
  if (T < 1) {
    add(r, "horizon", "must be >= 1");
    return r;
  }
  if (p.generators.empty()) add(r, "generators", "at least one generator is required");
  if (p.loads.empty()) add(r, "loads", "at least one load is required");

  for (int m = 0; m < p.num_generators(); ++m) check_generator(r, p.generators[static_cast<size_t>(m)], m, T);
  for (int n = 0; n < p.num_loads(); ++n) check_load(r, p.loads[static_cast<size_t>(n)], n, T);
  for (int i = 0; i < p.num_farms(); ++i) check_wind_farm(r, p.wind_farms[static_cast<size_t>(i)], i);
  check_correlation(r, p.farm_correlation, p.num_farms());

  if (p.fixed_demand.size() != T) add(r, "fixed_demand", "must have length T");
  if (p.spinning_reserve.size() != T) add(r, "spinning_reserve", "must have length T");
  if (p.prices.alpha.size() != T) add(r, "prices.alpha", "must have length T");
  if (p.prices.beta.size() != T) add(r, "prices.beta", "must have length T");
  if (p.initial_gen.size() != p.num_generators())
    add(r, "initial_gen", "must have one entry per generator");

  if (p.prices.alpha.size() == T && p.prices.beta.size() == T) {
    for (int t = 0; t < T; ++t) {
      if (!(p.prices.alpha[t] > 0.0))
        add(r, at("prices.alpha", t), "purchase price must be > 0 at slot " + std::to_string(t + 1));
      if (p.prices.beta[t] > p.prices.alpha[t])
        add(r, at("prices.beta", t), "beta exceeds alpha at slot " + std::to_string(t + 1));
    }
  }

  if (!(p.p_r_min <= p.p_r_max)) add(r, "p_r_max", "must satisfy p_r_min <= p_r_max");

  const double cap = p.total_gen_capacity();
  if (p.spinning_reserve.size() == T) {
    for (int t = 0; t < T; ++t) {
      if (cap - p.spinning_reserve[t] < 0.0)
        add(r, at("spinning_reserve", t),
            "reserve infeasible at slot " + std::to_string(t + 1) +
                ": total generation capacity " + std::to_string(cap) + " < SR");
    }
  }

  // Necessary supply/demand overlap per slot, ignoring ramps and reserve.
  if (p.fixed_demand.size() == T && !p.generators.empty() && !p.loads.empty()) {
    double gen_lo = 0.0, gen_hi = 0.0, load_lo = 0.0, load_hi = 0.0;
    for (const auto& g : p.generators) { gen_lo += g.p_min; gen_hi += g.p_max; }
    for (const auto& l : p.loads) { load_lo += l.p_min; load_hi += l.p_max; }
    for (int t = 0; t < T; ++t) {
      const double s_lo = gen_lo + p.p_r_min, s_hi = gen_hi + p.p_r_max;
      const double d_lo = load_lo + p.fixed_demand[t], d_hi = load_hi + p.fixed_demand[t];
      if (s_hi < d_lo || d_hi < s_lo)
        add(r, at("fixed_demand", t),
            "no balanced schedule exists at slot " + std::to_string(t + 1) +
                ": supply range [" + std::to_string(s_lo) + ", " + std::to_string(s_hi) +
                "] does not meet demand range [" + std::to_string(d_lo) + ", " +
                std::to_string(d_hi) + "]");
    }
  }

  if (p.initial_gen.size() == p.num_generators()) {
    for (int m = 0; m < p.num_generators(); ++m) {
      if (!std::isfinite(p.initial_gen[m]))
        add(r, at("initial_gen", m), "must be finite");
    }
  }
  return r;
}

DispatchProblem builtin_case_study() {
  DispatchProblem p;
  p.horizon = 8;
  p.generators = {
      {5.0, 70.0, 30.0, 30.0, 0.006, 14.0, {}, {}},
      {5.0, 80.0, 35.0, 35.0, 0.003, 20.0, {}, {}},
      {10.0, 85.0, 50.0, 50.0, 0.004, 50.0, {}, {}},
  };
  p.loads = {
      {5.0, 30.0, -0.20, 20.0, {}, {}},
      {8.0, 50.0, -0.30, 30.0, {}, {}},
      {3.0, 45.0, -0.17, 17.0, {}, {}},
  };
  // Four identical farms; Rayleigh-like speeds, 20 kWh rated each.
  p.wind_farms.assign(4, WindFarmParams{2.0, 8.0, 3.0, 11.0, 25.0, 20.0, 0.7});
  p.farm_correlation = Eigen::MatrixXd::Constant(4, 4, 0.5);
  p.farm_correlation.diagonal().setOnes();

  p.fixed_demand.resize(8);
  p.fixed_demand << 30, 34, 47, 60, 75, 67, 55, 43;
  p.spinning_reserve = Eigen::VectorXd::Constant(8, 6.66);
  p.prices.alpha.resize(8);
  p.prices.alpha << 1.40, 2.20, 4.70, 6.30, 8.50, 7.80, 5.60, 4.50;
  p.prices.beta.resize(8);
  p.prices.beta << 1.12, 1.76, 3.76, 5.04, 6.80, 6.24, 4.48, 3.60;
  p.p_r_min = 0.0;
  p.p_r_max = 60.0;
  p.initial_gen.resize(3);
  p.initial_gen << 5.0, 5.0, 10.0;
  return p;
}

}  // namespace mgdispatch
