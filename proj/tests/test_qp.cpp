#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "mgdispatch/qp.hpp"
#include "support/oracles.hpp"

using namespace mgdispatch;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

QpProblem scalar_box_qp() {
  // minimize (x-3)^2 over [0,2]
  QpProblem p;
  p.Q.resize(1, 1);
  p.Q << 2.0;
  p.q.resize(1);
  p.q << -6.0;
  p.eq_mat.resize(0, 1);
  p.eq_rhs.resize(0);
  p.ineq_mat.resize(0, 1);
  p.ineq_rhs.resize(0);
  p.lower.resize(1);
  p.lower << 0.0;
  p.upper.resize(1);
  p.upper << 2.0;
  return p;
}
}  // namespace

TEST_SUITE("qp") {

TEST_CASE("clamped scalar minimizer") {
  const QpSolution sol = solve_qp(scalar_box_qp(), 1e-8);
  REQUIRE(sol.status == QpStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.kkt.max() <= 1e-8);
}

TEST_CASE("equality constrained symmetric problem") {
  // minimize 1/2 ||x||^2 s.t. x1 + x2 = 2 -> x = (1,1), dual = -1
  QpProblem p;
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.q = Eigen::VectorXd::Zero(2);
  p.eq_mat.resize(1, 2);
  p.eq_mat << 1.0, 1.0;
  p.eq_rhs.resize(1);
  p.eq_rhs << 2.0;
  p.ineq_mat.resize(0, 2);
  p.ineq_rhs.resize(0);
  p.lower = Eigen::VectorXd::Constant(2, -kInf);
  p.upper = Eigen::VectorXd::Constant(2, kInf);

  const QpSolution sol = solve_qp(p, 1e-9);
  REQUIRE(sol.status == QpStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.eq_duals[0] == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("kkt residuals of an exact solution are tiny") {
  QpSolution exact;
  exact.x.resize(1);
  exact.x << 2.0;
  exact.eq_duals.resize(0);
  exact.ineq_duals.resize(0);
  exact.lower_duals = Eigen::VectorXd::Zero(1);
  exact.upper_duals.resize(1);
  exact.upper_duals << 2.0;  // -f'(2) = 6 - 4
  const KktResiduals r = kkt_residuals(scalar_box_qp(), exact);
  CHECK(r.max() <= 1e-12);
}

TEST_CASE("kkt residuals isolate a perturbed binding direction") {
  const QpProblem p = scalar_box_qp();
  QpSolution sol = solve_qp(p, 1e-10);
  sol.x[0] += 1e-3;  // push past the active upper bound
  const KktResiduals r = kkt_residuals(p, sol);
  CHECK(r.box_violation == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("feasible but suboptimal point fails stationarity only") {
  const QpProblem p = scalar_box_qp();
  QpSolution sol;
  sol.x.resize(1);
  sol.x << 1.0;  // interior, not optimal
  sol.eq_duals.resize(0);
  sol.ineq_duals.resize(0);
  sol.lower_duals = Eigen::VectorXd::Zero(1);
  sol.upper_duals = Eigen::VectorXd::Zero(1);
  const KktResiduals r = kkt_residuals(p, sol);
  CHECK(r.stationarity > 1e-6);
  CHECK(r.eq_violation == 0.0);
  CHECK(r.ineq_violation == 0.0);
  CHECK(r.box_violation == 0.0);
}

TEST_CASE("box-only instances match the projected gradient oracle") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    oracles::RandomQpSpec spec;
    spec.n = 2 + static_cast<int>(rng() % 7);
    const QpProblem p = oracles::random_qp(spec, rng);
    const QpSolution sol = solve_qp(p, 1e-9);
    REQUIRE(sol.status == QpStatus::optimal);
    const Eigen::VectorXd ref = oracles::projected_gradient_box(p.Q, p.q, p.lower, p.upper);
    CHECK((sol.x - ref).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("general instances are kkt certified") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    oracles::RandomQpSpec spec;
    spec.n = 3 + static_cast<int>(rng() % 6);
    spec.with_eq = trial % 2 == 0;
    spec.with_ineq = true;
    const QpProblem p = oracles::random_qp(spec, rng);
    const QpSolution sol = solve_qp(p, 1e-7);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK(kkt_residuals(p, sol).max() <= 1e-7);
  }
}

TEST_CASE("returned objective beats random feasible points") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  oracles::RandomQpSpec box_spec;
  box_spec.n = 5;
  oracles::RandomQpSpec ineq_spec;
  ineq_spec.n = 5;
  ineq_spec.with_ineq = true;
  for (const auto& spec : {box_spec, ineq_spec}) {
    const QpProblem p = oracles::random_qp(spec, rng);
    const QpSolution sol = solve_qp(p, 1e-9);
    REQUIRE(sol.status == QpStatus::optimal);
    const auto objective = [&](const Eigen::VectorXd& x) {
      return 0.5 * x.dot(p.Q * x) + p.q.dot(x);
    };
    // Rejection sampling in the box intersected with the inequalities.
    int accepted = 0;
    while (accepted < 100) {
      Eigen::VectorXd x(p.num_vars());
      for (int i = 0; i < p.num_vars(); ++i)
        x[i] = p.lower[i] + unit(rng) * (p.upper[i] - p.lower[i]);
      if (p.num_ineq() > 0 && ((p.ineq_mat * x - p.ineq_rhs).array() > 0.0).any()) continue;
      ++accepted;
      CHECK(objective(sol.x) <= objective(x) + 1e-9);
    }
  }
}

TEST_CASE("argmin is invariant to objective scaling") {
  std::mt19937_64 rng(1234);
  oracles::RandomQpSpec spec;
  spec.n = 6;
  spec.with_ineq = true;
  spec.strong_convexity = 1.0;  // keeps the stationarity -> argmin factor near 1
  QpProblem p = oracles::random_qp(spec, rng);
  const double tol = 1e-8;
  const QpSolution base = solve_qp(p, tol);
  REQUIRE(base.status == QpStatus::optimal);
  for (double k : {0.5, 3.0, 10.0}) {
    QpProblem scaled = p;
    scaled.Q *= k;
    scaled.q *= k;
    const QpSolution sol = solve_qp(scaled, tol);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK((sol.x - base.x).lpNorm<Eigen::Infinity>() <= 10 * tol);
  }
}

TEST_CASE("deterministic resolve") {
  std::mt19937_64 rng(5);
  oracles::RandomQpSpec spec;
  spec.n = 6;
  spec.with_eq = true;
  spec.with_ineq = true;
  const QpProblem p = oracles::random_qp(spec, rng);
  const QpSolution a = solve_qp(p, 1e-8);
  const QpSolution b = solve_qp(p, 1e-8);
  REQUIRE(a.status == QpStatus::optimal);
  CHECK(a.x == b.x);  // bitwise
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("crossing bounds are rejected as infeasible") {
  QpProblem p = scalar_box_qp();
  p.lower[0] = 3.0;  // above upper = 2
  const QpSolution sol = solve_qp(p);
  CHECK(sol.status == QpStatus::infeasible);
  CHECK(!sol.message.empty());
}

TEST_CASE("conflicting equalities are not labeled optimal") {
  QpProblem p;
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.q = Eigen::VectorXd::Zero(2);
  p.eq_mat.resize(2, 2);
  p.eq_mat << 1.0, 1.0, 1.0, 1.0;
  p.eq_rhs.resize(2);
  p.eq_rhs << 2.0, 3.0;
  p.ineq_mat.resize(0, 2);
  p.ineq_rhs.resize(0);
  p.lower = Eigen::VectorXd::Constant(2, -10.0);
  p.upper = Eigen::VectorXd::Constant(2, 10.0);
  const QpSolution sol = solve_qp(p, 1e-8, 60);
  CHECK(sol.status != QpStatus::optimal);
}

TEST_CASE("contradictory inequalities are detected") {
  // x <= 0 and -x <= -1 cannot hold together.
  QpProblem p;
  p.Q.resize(1, 1);
  p.Q << 1.0;
  p.q.resize(1);
  p.q << 0.0;
  p.eq_mat.resize(0, 1);
  p.eq_rhs.resize(0);
  p.ineq_mat.resize(2, 1);
  p.ineq_mat << 1.0, -1.0;
  p.ineq_rhs.resize(2);
  p.ineq_rhs << 0.0, -1.0;
  p.lower = Eigen::VectorXd::Constant(1, -kInf);
  p.upper = Eigen::VectorXd::Constant(1, kInf);
  const QpSolution sol = solve_qp(p, 1e-8, 60);
  CHECK(sol.status != QpStatus::optimal);
}

TEST_CASE("iteration cap returns best iterate with residual report") {
  std::mt19937_64 rng(11);
  oracles::RandomQpSpec spec;
  spec.n = 6;
  spec.with_ineq = true;
  const QpProblem p = oracles::random_qp(spec, rng);
  const QpSolution sol = solve_qp(p, 1e-8, 2);
  CHECK(sol.status == QpStatus::max_iter);
  CHECK(sol.x.allFinite());
  CHECK(std::isfinite(sol.kkt.max()));
  CHECK(!sol.message.empty());
}

TEST_CASE("invariant checker flags bad data") {
  QpProblem p = scalar_box_qp();
  CHECK(!check_qp_invariants(p).has_value());
  p.Q(0, 0) = -1.0;
  CHECK(check_qp_invariants(p).has_value());
}

}  // TEST_SUITE
