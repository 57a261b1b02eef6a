#include "mgdispatch/central.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mgdispatch/costs.hpp"

namespace mgdispatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Variable layout shared by both centralized solves:
//   p_G at t*M + m, p_D at MT + t*N + n, p_R at MT + NT + t,
//   epigraph u at MT + NT + T + s*T + t (SAA only).
struct Layout {
  int M, N, T, S;
  int g(int m, int t) const { return t * M + m; }
  int d(int n, int t) const { return M * T + t * N + n; }
  int r(int t) const { return M * T + N * T + t; }
  int u(int s, int t) const { return M * T + N * T + T + s * T + t; }
  int num_vars() const { return M * T + N * T + T + S * T; }
};

void require_valid(const DispatchProblem& problem) {
  const ValidationReport report = validate_problem(problem);
  if (!report.ok())
    throw std::invalid_argument("central solve: invalid problem:\n" + report.to_string());
}

// Objective, boxes, balance equalities, ramps and reserve — everything both
// formulations share.
QpProblem base_qp(const DispatchProblem& problem, const Layout& lay) {
  const int M = lay.M, N = lay.N, T = lay.T;
  const int n = lay.num_vars();

  QpProblem qp;
  qp.Q = Eigen::MatrixXd::Zero(n, n);
  qp.q.setZero(n);
  qp.lower.setConstant(n, -kInf);
  qp.upper.setConstant(n, kInf);

  for (int t = 0; t < T; ++t) {
    for (int m = 0; m < M; ++m) {
      const auto& g = problem.generators[static_cast<size_t>(m)];
      qp.Q(lay.g(m, t), lay.g(m, t)) = 2.0 * g.quad_coeff(t);
      qp.q[lay.g(m, t)] = g.lin_coeff(t);
      qp.lower[lay.g(m, t)] = g.p_min;
      qp.upper[lay.g(m, t)] = g.p_max;
    }
    for (int l = 0; l < N; ++l) {
      const auto& ld = problem.loads[static_cast<size_t>(l)];
      qp.Q(lay.d(l, t), lay.d(l, t)) = -2.0 * ld.quad_coeff(t);
      qp.q[lay.d(l, t)] = -ld.lin_coeff(t);
      qp.lower[lay.d(l, t)] = ld.p_min;
      qp.upper[lay.d(l, t)] = ld.p_max;
    }
    qp.lower[lay.r(t)] = problem.p_r_min;
    qp.upper[lay.r(t)] = problem.p_r_max;
  }

  // Balance equalities.
  qp.eq_mat = Eigen::MatrixXd::Zero(T, n);
  qp.eq_rhs.resize(T);
  for (int t = 0; t < T; ++t) {
    for (int m = 0; m < M; ++m) qp.eq_mat(t, lay.g(m, t)) = 1.0;
    qp.eq_mat(t, lay.r(t)) = 1.0;
    for (int l = 0; l < N; ++l) qp.eq_mat(t, lay.d(l, t)) = -1.0;
    qp.eq_rhs[t] = problem.fixed_demand[t];
  }

  // Ramps (anchored) + reserve; epigraph rows appended by the SAA variant.
  const int n_rows = 2 * M * T + T;
  qp.ineq_mat = Eigen::MatrixXd::Zero(n_rows, n);
  qp.ineq_rhs.resize(n_rows);
  int r = 0;
  for (int t = 0; t < T; ++t) {
    for (int m = 0; m < M; ++m) {
      const auto& g = problem.generators[static_cast<size_t>(m)];
      if (t == 0) {
        qp.ineq_mat(r, lay.g(m, 0)) = 1.0;
        qp.ineq_rhs[r++] = problem.initial_gen[m] + g.ramp_up;
        qp.ineq_mat(r, lay.g(m, 0)) = -1.0;
        qp.ineq_rhs[r++] = -(problem.initial_gen[m] - g.ramp_down);
      } else {
        qp.ineq_mat(r, lay.g(m, t)) = 1.0;
        qp.ineq_mat(r, lay.g(m, t - 1)) = -1.0;
        qp.ineq_rhs[r++] = g.ramp_up;
        qp.ineq_mat(r, lay.g(m, t)) = -1.0;
        qp.ineq_mat(r, lay.g(m, t - 1)) = 1.0;
        qp.ineq_rhs[r++] = g.ramp_down;
      }
    }
    for (int m = 0; m < M; ++m) qp.ineq_mat(r, lay.g(m, t)) = 1.0;
    qp.ineq_rhs[r++] = problem.total_gen_capacity() - problem.spinning_reserve[t];
  }
  return qp;
}

Schedule extract_schedule(const Eigen::VectorXd& x, const Layout& lay) {
  Schedule s;
  s.p_g.resize(lay.M, lay.T);
  s.p_d.resize(lay.N, lay.T);
  s.p_r.resize(lay.T);
  for (int t = 0; t < lay.T; ++t) {
    for (int m = 0; m < lay.M; ++m) s.p_g(m, t) = x[lay.g(m, t)];
    for (int n = 0; n < lay.N; ++n) s.p_d(n, t) = x[lay.d(n, t)];
    s.p_r[t] = x[lay.r(t)];
  }
  return s;
}

double qp_objective(const QpProblem& qp, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(qp.Q * x) + qp.q.dot(x);
}

QpSolution certified_solve(const QpProblem& qp, double tol) {
  QpSolution sol = solve_qp(qp, tol);
  if (sol.status != QpStatus::optimal)
    throw SolverFailure(sol.status, std::string("central solve failed: ") + to_string(sol.status) +
                                        " (" + sol.message + ")");
  return sol;
}

}  // namespace

CentralResult solve_central_saa(const DispatchProblem& problem, const ScenarioSet& scenarios,
                                double tol) {
  require_valid(problem);
  const int T = problem.horizon;
  if (scenarios.aggregate.cols() != T)
    throw std::invalid_argument("solve_central_saa: scenario horizon mismatch");
  const int S = static_cast<int>(scenarios.aggregate.rows());
  const Layout lay{problem.num_generators(), problem.num_loads(), T, S};

  QpProblem qp = base_qp(problem, lay);
  const auto [delta, gamma] = delta_gamma(problem.prices);
  const Eigen::VectorXd mean_totals = scenarios.means.colwise().sum();

  for (int t = 0; t < T; ++t) qp.q[lay.r(t)] = gamma[t];

  // Epigraph variables u >= |p_R - W(s,t)|, kept boxed to the attainable
  // deviation span for conditioning.
  const double w_min = scenarios.aggregate.minCoeff();
  const double w_max = scenarios.aggregate.maxCoeff();
  const double u_cap = (w_max - w_min) + (problem.p_r_max - problem.p_r_min) + 1.0;
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < T; ++t) {
      qp.q[lay.u(s, t)] = delta[t] / static_cast<double>(S);
      qp.lower[lay.u(s, t)] = 0.0;
      qp.upper[lay.u(s, t)] = u_cap;
    }
  }

  const int base_rows = qp.num_ineq();
  Eigen::MatrixXd ineq = Eigen::MatrixXd::Zero(base_rows + 2 * S * T, lay.num_vars());
  Eigen::VectorXd rhs(base_rows + 2 * S * T);
  ineq.topRows(base_rows) = qp.ineq_mat;
  rhs.head(base_rows) = qp.ineq_rhs;
  int r = base_rows;
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < T; ++t) {
      ineq(r, lay.r(t)) = 1.0;
      ineq(r, lay.u(s, t)) = -1.0;
      rhs[r++] = scenarios.aggregate(s, t);
      ineq(r, lay.r(t)) = -1.0;
      ineq(r, lay.u(s, t)) = -1.0;
      rhs[r++] = -scenarios.aggregate(s, t);
    }
  }
  qp.ineq_mat = std::move(ineq);
  qp.ineq_rhs = std::move(rhs);

  CentralResult result;
  result.qp = certified_solve(qp, tol);
  result.schedule = extract_schedule(result.qp.x, lay);
  result.objective = qp_objective(qp, result.qp.x) - gamma.dot(mean_totals);
  return result;
}

CentralResult solve_central_lmp(const DispatchProblem& problem, const Eigen::MatrixXd& mean_wind,
                                double tol) {
  require_valid(problem);
  const int T = problem.horizon;
  if ((problem.prices.alpha - problem.prices.beta).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument(
        "solve_central_lmp: requires alpha == beta at every slot (copy alpha into beta)");
  if (mean_wind.cols() != T || mean_wind.rows() != problem.num_farms())
    throw std::invalid_argument("solve_central_lmp: mean_wind must be I x T");

  const Layout lay{problem.num_generators(), problem.num_loads(), T, 0};
  QpProblem qp = base_qp(problem, lay);
  const Eigen::VectorXd mean_totals = mean_wind.colwise().sum();
  for (int t = 0; t < T; ++t) qp.q[lay.r(t)] = problem.prices.alpha[t];

  CentralResult result;
  result.qp = certified_solve(qp, tol);
  result.schedule = extract_schedule(result.qp.x, lay);
  result.objective = qp_objective(qp, result.qp.x) - problem.prices.alpha.dot(mean_totals);
  return result;
}

}  // namespace mgdispatch
