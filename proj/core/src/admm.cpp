#include "mgdispatch/admm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mgdispatch/costs.hpp"
#include "mgdispatch/piecewise_prox.hpp"
#include "mgdispatch/qp.hpp"

namespace mgdispatch {

const char* to_string(AgentId id) {
  switch (id) {
    case AgentId::generation: return "generation";
    case AgentId::loads: return "loads";
    case AgentId::wind: return "wind";
    case AgentId::dual: return "dual";
  }
  return "unknown";
}

void MessageBus::broadcast(AgentId sender, int iteration, Eigen::MatrixXd payload) {
  latest_[static_cast<int>(sender)] = payload;
  log_.push_back({sender, iteration, std::move(payload)});
}

bool MessageBus::has(AgentId sender) const {
  return latest_[static_cast<int>(sender)].has_value();
}

const Eigen::MatrixXd& MessageBus::latest(AgentId sender) const {
  const auto& slot = latest_[static_cast<int>(sender)];
  if (!slot) throw std::logic_error(std::string("no message from agent ") + to_string(sender));
  return *slot;
}

bool MessageBus::ordering_valid() const {
  static constexpr AgentId cycle[4] = {AgentId::generation, AgentId::loads, AgentId::wind,
                                       AgentId::dual};
  int iter = 0, pos = 0;
  for (const auto& msg : log_) {
    if (msg.iteration == 0) {
      if (iter != 0) return false;  // setup messages must precede the loop
      continue;
    }
    if (pos == 0) {
      if (msg.iteration != iter + 1) return false;
      iter = msg.iteration;
    } else if (msg.iteration != iter) {
      return false;
    }
    if (msg.sender != cycle[pos]) return false;
    pos = (pos + 1) % 4;
  }
  return pos == 0;
}

namespace {

// Shared slot-coupled QP assembly: variables x[(t*U)+u], Hessian
// diag(2*cost_quad) + rho * (per-slot all-ones block).
Eigen::MatrixXd coupled_hessian(int units, int T, const std::vector<double>& quad_diag,
                                double rho) {
  const int n = units * T;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) Q(i, i) = 2.0 * quad_diag[static_cast<size_t>(i)];
  for (int t = 0; t < T; ++t) Q.block(t * units, t * units, units, units).array() += rho;
  return Q;
}

class GenerationAgent {
 public:
  GenerationAgent(const DispatchProblem& problem, double rho, double qp_tol, int qp_max_iter)
      : problem_(problem), rho_(rho), qp_tol_(qp_tol), qp_max_iter_(qp_max_iter) {
    const int M = problem.num_generators();
    const int T = problem.horizon;
    const int n = M * T;

    std::vector<double> quad(static_cast<size_t>(n));
    qp_.lower.resize(n);
    qp_.upper.resize(n);
    for (int t = 0; t < T; ++t) {
      for (int m = 0; m < M; ++m) {
        const auto& g = problem.generators[static_cast<size_t>(m)];
        quad[static_cast<size_t>(t * M + m)] = g.quad_coeff(t);
        qp_.lower[t * M + m] = g.p_min;
        qp_.upper[t * M + m] = g.p_max;
      }
    }
    qp_.Q = coupled_hessian(M, T, quad, rho);
    qp_.q.setZero(n);
    qp_.eq_mat.resize(0, n);
    qp_.eq_rhs.resize(0);

    // Ramp limits (anchored at initial_gen for the first slot) and the
    // spinning-reserve headroom per slot.
    const int n_rows = 2 * M * T + T;
    qp_.ineq_mat = Eigen::MatrixXd::Zero(n_rows, n);
    qp_.ineq_rhs.resize(n_rows);
    int r = 0;
    for (int t = 0; t < T; ++t) {
      for (int m = 0; m < M; ++m) {
        const auto& g = problem.generators[static_cast<size_t>(m)];
        if (t == 0) {
          qp_.ineq_mat(r, m) = 1.0;
          qp_.ineq_rhs[r++] = problem.initial_gen[m] + g.ramp_up;
          qp_.ineq_mat(r, m) = -1.0;
          qp_.ineq_rhs[r++] = -(problem.initial_gen[m] - g.ramp_down);
        } else {
          qp_.ineq_mat(r, t * M + m) = 1.0;
          qp_.ineq_mat(r, (t - 1) * M + m) = -1.0;
          qp_.ineq_rhs[r++] = g.ramp_up;
          qp_.ineq_mat(r, t * M + m) = -1.0;
          qp_.ineq_mat(r, (t - 1) * M + m) = 1.0;
          qp_.ineq_rhs[r++] = g.ramp_down;
        }
      }
      for (int m = 0; m < M; ++m) qp_.ineq_mat(r, t * M + m) = 1.0;
      qp_.ineq_rhs[r++] = problem.total_gen_capacity() - problem.spinning_reserve[t];
    }
  }

  Eigen::MatrixXd update(const Eigen::MatrixXd& p_d, const Eigen::VectorXd& p_r,
                         const Eigen::VectorXd& lambda) {
    const int M = problem_.num_generators();
    const int T = problem_.horizon;
    for (int t = 0; t < T; ++t) {
      const double offset = p_r[t] - p_d.col(t).sum() - problem_.fixed_demand[t];
      for (int m = 0; m < M; ++m) {
        const auto& g = problem_.generators[static_cast<size_t>(m)];
        qp_.q[t * M + m] = g.lin_coeff(t) + lambda[t] + rho_ * offset;
      }
    }
    const QpSolution sol = solve_qp(qp_, qp_tol_, qp_max_iter_);
    if (sol.status != QpStatus::optimal) {
      throw SolverFailure(sol.status, std::string("generation block solve failed: ") +
                                          to_string(sol.status) + " (" + sol.message + ")");
    }
    Eigen::MatrixXd out(M, T);
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m) out(m, t) = sol.x[t * M + m];
    return out;
  }

 private:
  const DispatchProblem& problem_;
  double rho_, qp_tol_;
  int qp_max_iter_;
  QpProblem qp_;
};

class LoadAgent {
 public:
  LoadAgent(const DispatchProblem& problem, double rho, double qp_tol, int qp_max_iter)
      : problem_(problem), rho_(rho), qp_tol_(qp_tol), qp_max_iter_(qp_max_iter) {
    const int N = problem.num_loads();
    const int T = problem.horizon;
    const int n = N * T;
    std::vector<double> quad(static_cast<size_t>(n));
    qp_.lower.resize(n);
    qp_.upper.resize(n);
    for (int t = 0; t < T; ++t) {
      for (int l = 0; l < N; ++l) {
        const auto& ld = problem.loads[static_cast<size_t>(l)];
        quad[static_cast<size_t>(t * N + l)] = -ld.quad_coeff(t);  // utility enters negated
        qp_.lower[t * N + l] = ld.p_min;
        qp_.upper[t * N + l] = ld.p_max;
      }
    }
    qp_.Q = coupled_hessian(N, T, quad, rho);
    qp_.q.setZero(n);
    qp_.eq_mat.resize(0, n);
    qp_.eq_rhs.resize(0);
    qp_.ineq_mat.resize(0, n);
    qp_.ineq_rhs.resize(0);
  }

  Eigen::MatrixXd update(const Eigen::MatrixXd& p_g, const Eigen::VectorXd& p_r,
                         const Eigen::VectorXd& lambda) {
    const int N = problem_.num_loads();
    const int T = problem_.horizon;
    for (int t = 0; t < T; ++t) {
      const double supply = p_g.col(t).sum() + p_r[t] - problem_.fixed_demand[t];
      for (int l = 0; l < N; ++l) {
        const auto& ld = problem_.loads[static_cast<size_t>(l)];
        qp_.q[t * N + l] = -ld.lin_coeff(t) - lambda[t] - rho_ * supply;
      }
    }
    const QpSolution sol = solve_qp(qp_, qp_tol_, qp_max_iter_);
    if (sol.status != QpStatus::optimal) {
      throw SolverFailure(sol.status, std::string("load block solve failed: ") +
                                          to_string(sol.status) + " (" + sol.message + ")");
    }
    Eigen::MatrixXd out(N, T);
    for (int t = 0; t < T; ++t)
      for (int l = 0; l < N; ++l) out(l, t) = sol.x[t * N + l];
    return out;
  }

 private:
  const DispatchProblem& problem_;
  double rho_, qp_tol_;
  int qp_max_iter_;
  QpProblem qp_;
};

// Owns the committed-wind update and, by convention, the dual ascent step.
class WindAgent {
 public:
  WindAgent(const DispatchProblem& problem, const ScenarioSet& scenarios, double rho)
      : problem_(problem), rho_(rho), n_samples_(scenarios.n_samples) {
    const auto [delta, gamma] = delta_gamma(problem.prices);
    delta_ = delta;
    gamma_ = gamma;
    const int T = problem.horizon;
    sorted_breakpoints_.resize(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
      auto& col = sorted_breakpoints_[static_cast<size_t>(t)];
      col.assign(scenarios.aggregate.col(t).begin(), scenarios.aggregate.col(t).end());
      std::sort(col.begin(), col.end());
    }
  }

  Eigen::VectorXd update(const Eigen::MatrixXd& p_g, const Eigen::MatrixXd& p_d,
                         const Eigen::VectorXd& lambda) const {
    const int T = problem_.horizon;
    Eigen::VectorXd p_r(T);
    for (int t = 0; t < T; ++t) {
      const double center = problem_.fixed_demand[t] + p_d.col(t).sum() - p_g.col(t).sum();
      const auto& bps = sorted_breakpoints_[static_cast<size_t>(t)];
      p_r[t] = piecewise_prox_1d_sorted_uniform(
          bps, delta_[t] / static_cast<double>(n_samples_), gamma_[t] + lambda[t], rho_, center,
          problem_.p_r_min, problem_.p_r_max);
    }
    return p_r;
  }

  Eigen::VectorXd ascend(const Eigen::VectorXd& lambda, double nu,
                         const Eigen::VectorXd& imbalance) const {
    return dual_ascent(lambda, nu, imbalance);
  }

 private:
  const DispatchProblem& problem_;
  double rho_;
  int n_samples_;
  Eigen::VectorXd delta_, gamma_;
  std::vector<std::vector<double>> sorted_breakpoints_;
};

Eigen::VectorXd slot_imbalance(const Eigen::MatrixXd& p_g, const Eigen::MatrixXd& p_d,
                               const Eigen::VectorXd& p_r, const Eigen::VectorXd& fixed_demand) {
  return p_g.colwise().sum().transpose() + p_r - p_d.colwise().sum().transpose() - fixed_demand;
}

void check_config(const AdmmConfig& c) {
  if (!(c.rho > 0.0)) throw std::invalid_argument("admm: rho must be > 0");
  if (!(c.nu >= 0.0)) throw std::invalid_argument("admm: nu must be >= 0");
  if (!(c.eps_res > 0.0)) throw std::invalid_argument("admm: eps_res must be > 0");
  if (c.max_iters < 1) throw std::invalid_argument("admm: max_iters must be >= 1");
}

void initial_blocks(const DispatchProblem& problem, const AdmmConfig& config, Eigen::MatrixXd& p_g,
                    Eigen::MatrixXd& p_d, Eigen::VectorXd& p_r) {
  const int M = problem.num_generators();
  const int N = problem.num_loads();
  const int T = problem.horizon;
  p_g.resize(M, T);
  p_d.resize(N, T);
  p_r.resize(T);
  switch (config.init_strategy) {
    case AdmmConfig::Init::lower_bounds:
      for (int m = 0; m < M; ++m) p_g.row(m).setConstant(problem.generators[static_cast<size_t>(m)].p_min);
      for (int n = 0; n < N; ++n) p_d.row(n).setConstant(problem.loads[static_cast<size_t>(n)].p_min);
      p_r.setConstant(problem.p_r_min);
      break;
    case AdmmConfig::Init::box_midpoint:
      for (int m = 0; m < M; ++m) {
        const auto& g = problem.generators[static_cast<size_t>(m)];
        p_g.row(m).setConstant(0.5 * (g.p_min + g.p_max));
      }
      for (int n = 0; n < N; ++n) {
        const auto& l = problem.loads[static_cast<size_t>(n)];
        p_d.row(n).setConstant(0.5 * (l.p_min + l.p_max));
      }
      p_r.setConstant(0.5 * (problem.p_r_min + problem.p_r_max));
      break;
    case AdmmConfig::Init::custom:
      if (config.custom_p_d.rows() != N || config.custom_p_d.cols() != T ||
          config.custom_p_r.size() != T)
        throw std::invalid_argument("admm: custom initialization has wrong dimensions");
      for (int m = 0; m < M; ++m) p_g.row(m).setConstant(problem.generators[static_cast<size_t>(m)].p_min);
      p_d = config.custom_p_d;
      p_r = config.custom_p_r;
      break;
  }
}

}  // namespace

Eigen::MatrixXd solve_generation_block(const DispatchProblem& problem, const Eigen::MatrixXd& p_d,
                                       const Eigen::VectorXd& p_r, const Eigen::VectorXd& lambda,
                                       double rho, double qp_tol, int qp_max_iter) {
  return GenerationAgent(problem, rho, qp_tol, qp_max_iter).update(p_d, p_r, lambda);
}

Eigen::MatrixXd solve_load_block(const DispatchProblem& problem, const Eigen::MatrixXd& p_g,
                                 const Eigen::VectorXd& p_r, const Eigen::VectorXd& lambda,
                                 double rho, double qp_tol, int qp_max_iter) {
  return LoadAgent(problem, rho, qp_tol, qp_max_iter).update(p_g, p_r, lambda);
}

Eigen::VectorXd solve_wind_block(const DispatchProblem& problem, const ScenarioSet& scenarios,
                                 const Eigen::MatrixXd& p_g, const Eigen::MatrixXd& p_d,
                                 const Eigen::VectorXd& lambda, double rho) {
  return WindAgent(problem, scenarios, rho).update(p_g, p_d, lambda);
}

Eigen::MatrixXd update_generation(const AdmmState& state, const DispatchProblem& problem,
                                  const AdmmConfig& config) {
  return solve_generation_block(problem, state.p_d, state.p_r, state.lambda, config.rho,
                                config.qp_tol, config.qp_max_iter);
}

Eigen::MatrixXd update_loads(const AdmmState& state, const DispatchProblem& problem,
                             const AdmmConfig& config) {
  return solve_load_block(problem, state.p_g, state.p_r, state.lambda, config.rho, config.qp_tol,
                          config.qp_max_iter);
}

Eigen::VectorXd update_wind_schedule(const AdmmState& state, const DispatchProblem& problem,
                                     const ScenarioSet& scenarios, const AdmmConfig& config) {
  return solve_wind_block(problem, scenarios, state.p_g, state.p_d, state.lambda, config.rho);
}

Eigen::VectorXd dual_ascent(const Eigen::VectorXd& lambda, double nu,
                            const Eigen::VectorXd& imbalance) {
  if (lambda.size() != imbalance.size())
    throw std::invalid_argument("dual_ascent: length mismatch");
  return lambda + nu * imbalance;
}

double primal_residual(const Eigen::MatrixXd& p_g, const Eigen::MatrixXd& p_d,
                       const Eigen::VectorXd& p_r, const Eigen::VectorXd& fixed_demand) {
  return slot_imbalance(p_g, p_d, p_r, fixed_demand).norm();
}

AdmmResult run_admm(const DispatchProblem& problem, const ScenarioSet& scenarios,
                    const AdmmConfig& config) {
  check_config(config);
  const ValidationReport report = validate_problem(problem);
  if (!report.ok())
    throw std::invalid_argument("run_admm: invalid problem:\n" + report.to_string());
  if (scenarios.n_samples < 1 || scenarios.aggregate.cols() != problem.horizon)
    throw std::invalid_argument("run_admm: scenario set does not match the problem horizon");

  const int T = problem.horizon;
  AdmmResult result;
  AdmmState& st = result.state;
  st.lambda = Eigen::VectorXd::Zero(T);
  initial_blocks(problem, config, st.p_g, st.p_d, st.p_r);

  GenerationAgent gen(problem, config.rho, config.qp_tol, config.qp_max_iter);
  LoadAgent load(problem, config.rho, config.qp_tol, config.qp_max_iter);
  WindAgent wind(problem, scenarios, config.rho);

  // Setup broadcasts: the first generation solve needs the peer blocks and
  // the multipliers on the wire.
  st.bus.broadcast(AgentId::loads, 0, st.p_d);
  st.bus.broadcast(AgentId::wind, 0, st.p_r);
  st.bus.broadcast(AgentId::dual, 0, st.lambda);

  st.trace.reserve(static_cast<size_t>(config.max_iters));
  for (int k = 1; k <= config.max_iters; ++k) {
    try {
      st.p_g = gen.update(st.bus.latest(AgentId::loads), st.bus.latest(AgentId::wind),
                          st.bus.latest(AgentId::dual));
      st.bus.broadcast(AgentId::generation, k, st.p_g);

      st.p_d = load.update(st.bus.latest(AgentId::generation), st.bus.latest(AgentId::wind),
                           st.bus.latest(AgentId::dual));
      st.bus.broadcast(AgentId::loads, k, st.p_d);

      st.p_r = wind.update(st.bus.latest(AgentId::generation), st.bus.latest(AgentId::loads),
                           st.bus.latest(AgentId::dual));
      st.bus.broadcast(AgentId::wind, k, st.p_r);
    } catch (const SolverFailure& e) {
      throw SolverFailure(e.status(), "admm iteration " + std::to_string(k) + ": " + e.what());
    }

    const Eigen::VectorXd imbalance = slot_imbalance(st.p_g, st.p_d, st.p_r, problem.fixed_demand);
    st.xi = imbalance.norm();
    st.lambda = wind.ascend(st.lambda, config.nu, imbalance);
    st.bus.broadcast(AgentId::dual, k, st.lambda);
    st.k = k;

    IterationRecord rec;
    rec.iteration = k;
    rec.net_cost = net_cost({st.p_g, st.p_d, st.p_r}, problem, scenarios).net_cost;
    rec.xi = st.xi;
    rec.lambda = st.lambda;
    rec.p_g = st.p_g;
    rec.p_d = st.p_d;
    rec.p_r = st.p_r;
    st.trace.push_back(std::move(rec));

    if (st.xi <= config.eps_res) {
      st.converged = true;
      break;
    }
  }

  result.converged = st.converged;
  result.schedule = {st.p_g, st.p_d, st.p_r};
  return result;
}

}  // namespace mgdispatch
