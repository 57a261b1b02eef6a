#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "mgdispatch/model.hpp"
#include "mgdispatch/windgen.hpp"

namespace mgdispatch {

struct AdmmConfig {
  double rho = 1.0;      // penalty weight of the balance residual
  double nu = 0.5;       // dual ascent stepsize
  double eps_res = 1e-2; // termination threshold on the primal residual, kWh
  int max_iters = 200;

  enum class Init { lower_bounds, box_midpoint, custom };
  Init init_strategy = Init::lower_bounds;
  // Consumed only with Init::custom; p_g has no influence on the first cycle.
  Eigen::MatrixXd custom_p_d;
  Eigen::VectorXd custom_p_r;

  double qp_tol = 1e-9;  // certification tolerance of the block QPs
  int qp_max_iter = 100;
};

enum class AgentId { generation, loads, wind, dual };

const char* to_string(AgentId id);

struct BusMessage {
  AgentId sender;
  int iteration;
  Eigen::MatrixXd payload;  // a primal block, or the multiplier column
};

// Simulated broadcast medium between the local controllers. Every block
// update is published here before the next agent acts, and the log doubles
// as the Gauss-Seidel ordering witness.
class MessageBus {
 public:
  void broadcast(AgentId sender, int iteration, Eigen::MatrixXd payload);
  bool has(AgentId sender) const;
  const Eigen::MatrixXd& latest(AgentId sender) const;
  const std::vector<BusMessage>& log() const { return log_; }

  // True iff every iteration k >= 1 delivered exactly the sequence
  // generation -> loads -> wind -> dual.
  bool ordering_valid() const;

 private:
  std::vector<BusMessage> log_;
  std::optional<Eigen::MatrixXd> latest_[4];
};

struct IterationRecord {
  int iteration = 0;
  double net_cost = 0.0;   // ¢, evaluated on the blocks of this iteration
  double xi = 0.0;         // kWh
  Eigen::VectorXd lambda;  // multipliers after this iteration's dual update
  Eigen::MatrixXd p_g, p_d;
  Eigen::VectorXd p_r;
};

struct AdmmState {
  int k = 0;  // completed iterations
  Eigen::VectorXd lambda;
  Eigen::MatrixXd p_g, p_d;
  Eigen::VectorXd p_r;
  double xi = 0.0;
  bool converged = false;
  std::vector<IterationRecord> trace;
  MessageBus bus;
};

struct AdmmResult {
  Schedule schedule;
  AdmmState state;
  bool converged = false;
};

// Block subproblems of one Gauss-Seidel cycle; each returns the exact
// minimizer of the augmented Lagrangian over its own feasible set with the
// other blocks held fixed. rho >= 0 (the algorithm itself requires > 0, the
// relaxation covers degenerate-parameter studies).
Eigen::MatrixXd solve_generation_block(const DispatchProblem& problem, const Eigen::MatrixXd& p_d,
                                       const Eigen::VectorXd& p_r, const Eigen::VectorXd& lambda,
                                       double rho, double qp_tol = 1e-9, int qp_max_iter = 100);
Eigen::MatrixXd solve_load_block(const DispatchProblem& problem, const Eigen::MatrixXd& p_g,
                                 const Eigen::VectorXd& p_r, const Eigen::VectorXd& lambda,
                                 double rho, double qp_tol = 1e-9, int qp_max_iter = 100);
Eigen::VectorXd solve_wind_block(const DispatchProblem& problem, const ScenarioSet& scenarios,
                                 const Eigen::MatrixXd& p_g, const Eigen::MatrixXd& p_d,
                                 const Eigen::VectorXd& lambda, double rho);

// State-based views of the same updates (the generation update consumes the
// state blocks as the previous cycle left them, and so on down the chain).
Eigen::MatrixXd update_generation(const AdmmState& state, const DispatchProblem& problem,
                                  const AdmmConfig& config);
Eigen::MatrixXd update_loads(const AdmmState& state, const DispatchProblem& problem,
                             const AdmmConfig& config);
Eigen::VectorXd update_wind_schedule(const AdmmState& state, const DispatchProblem& problem,
                                     const ScenarioSet& scenarios, const AdmmConfig& config);

Eigen::VectorXd dual_ascent(const Eigen::VectorXd& lambda, double nu,
                            const Eigen::VectorXd& imbalance);

// Euclidean norm of the slotwise supply-demand imbalance.
double primal_residual(const Eigen::MatrixXd& p_g, const Eigen::MatrixXd& p_d,
                       const Eigen::VectorXd& p_r, const Eigen::VectorXd& fixed_demand);

// Full decentralized solve: cycles generation -> loads -> wind -> dual over
// the message bus until the primal residual drops below eps_res or the
// iteration cap is hit (reported via the converged flag, not an exception).
AdmmResult run_admm(const DispatchProblem& problem, const ScenarioSet& scenarios,
                    const AdmmConfig& config);

}  // namespace mgdispatch
