#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>

namespace mgdispatch {

// Convex quadratic program
//   minimize   1/2 x'Qx + q'x
//   subject to E x = f,  A x <= b,  lower <= x <= upper
// with Q symmetric positive semidefinite. Box entries may be +-infinity.
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  Eigen::MatrixXd eq_mat;    // p x n
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ineq_mat;  // m x n
  Eigen::VectorXd ineq_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_vars() const { return static_cast<int>(Q.rows()); }
  int num_eq() const { return static_cast<int>(eq_mat.rows()); }
  int num_ineq() const { return static_cast<int>(ineq_mat.rows()); }

  static QpProblem boxed(Eigen::MatrixXd Q, Eigen::VectorXd q, Eigen::VectorXd lower,
                         Eigen::VectorXd upper);
};

enum class QpStatus { optimal, infeasible, max_iter };

const char* to_string(QpStatus s);

struct KktResiduals {
  double stationarity = 0.0;
  double eq_violation = 0.0;
  double ineq_violation = 0.0;
  double box_violation = 0.0;
  double complementarity = 0.0;

  double max() const;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd eq_duals;     // multipliers of Ex = f
  Eigen::VectorXd ineq_duals;   // multipliers of Ax <= b, >= 0
  Eigen::VectorXd lower_duals;  // multipliers of x >= lower, >= 0
  Eigen::VectorXd upper_duals;  // multipliers of x <= upper, >= 0
  QpStatus status = QpStatus::max_iter;
  KktResiduals kkt;
  int iterations = 0;
  std::string message;
};

// Structural checks on the problem data (symmetry after symmetrization,
// PSD within floor, box ordering). Returns an explanation for the first
// failed invariant, or nullopt. Costs an eigendecomposition; meant for
// validation paths, not the solver hot loop.
std::optional<std::string> check_qp_invariants(const QpProblem& p);

// Infinity-norm KKT report of `sol` against `p`; pure function of its inputs.
KktResiduals kkt_residuals(const QpProblem& p, const QpSolution& sol);

// Dense primal-dual interior-point solve (Mehrotra predictor-corrector).
// status == optimal guarantees every KKT residual is <= tol.
QpSolution solve_qp(const QpProblem& p, double tol = 1e-6, int max_iter = 100);

// Raised by higher-level solvers when the kernel cannot certify a solution.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(QpStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  QpStatus status() const { return status_; }

 private:
  QpStatus status_;
};

}  // namespace mgdispatch
