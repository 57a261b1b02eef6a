#include "mgdispatch/qp.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mgdispatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowKind { general, upper_box, lower_box };

// One stacked inequality row g'x <= h, stored sparsely.
struct Row {
  std::vector<std::pair<int, double>> entries;
  double rhs = 0.0;
  RowKind kind = RowKind::general;
  int index = 0;  // row of A, or variable index for box rows

  double dot(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (const auto& [i, c] : entries) v += c * x[i];
    return v;
  }
};

std::vector<Row> stack_inequalities(const QpProblem& p) {
  std::vector<Row> rows;
  const int n = p.num_vars();
  const int m = p.num_ineq();
  rows.reserve(static_cast<size_t>(m + 2 * n));
  for (int j = 0; j < m; ++j) {
    Row r;
    r.kind = RowKind::general;
    r.index = j;
    r.rhs = p.ineq_rhs[j];
    for (int i = 0; i < n; ++i) {
      const double c = p.ineq_mat(j, i);
      if (c != 0.0) r.entries.emplace_back(i, c);
    }
    rows.push_back(std::move(r));
  }
  for (int i = 0; i < n; ++i) {
    if (p.upper[i] < kInf) rows.push_back({{{i, 1.0}}, p.upper[i], RowKind::upper_box, i});
  }
  for (int i = 0; i < n; ++i) {
    if (p.lower[i] > -kInf) rows.push_back({{{i, -1.0}}, -p.lower[i], RowKind::lower_box, i});
  }
  return rows;
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

struct Unstacked {
  Eigen::VectorXd ineq, lower, upper;
};

Unstacked unstack_duals(const std::vector<Row>& rows, const Eigen::VectorXd& z,
                        const QpProblem& p) {
  Unstacked u;
  u.ineq.setZero(p.num_ineq());
  u.lower.setZero(p.num_vars());
  u.upper.setZero(p.num_vars());
  for (size_t r = 0; r < rows.size(); ++r) {
    const double zi = z[static_cast<Eigen::Index>(r)];
    switch (rows[r].kind) {
      case RowKind::general: u.ineq[rows[r].index] = zi; break;
      case RowKind::upper_box: u.upper[rows[r].index] = zi; break;
      case RowKind::lower_box: u.lower[rows[r].index] = zi; break;
    }
  }
  return u;
}

void check_dimensions(const QpProblem& p) {
  const int n = p.num_vars();
  if (n == 0) throw std::invalid_argument("solve_qp: empty problem");
  if (p.Q.cols() != n || p.q.size() != n)
    throw std::invalid_argument("solve_qp: Q/q dimension mismatch");
  if (p.eq_mat.rows() != p.eq_rhs.size() || (p.eq_mat.rows() > 0 && p.eq_mat.cols() != n))
    throw std::invalid_argument("solve_qp: equality dimension mismatch");
  if (p.ineq_mat.rows() != p.ineq_rhs.size() || (p.ineq_mat.rows() > 0 && p.ineq_mat.cols() != n))
    throw std::invalid_argument("solve_qp: inequality dimension mismatch");
  if (p.lower.size() != n || p.upper.size() != n)
    throw std::invalid_argument("solve_qp: bound dimension mismatch");
}

}  // namespace

QpProblem QpProblem::boxed(Eigen::MatrixXd Q, Eigen::VectorXd q, Eigen::VectorXd lower,
                           Eigen::VectorXd upper) {
  QpProblem p;
  const int n = static_cast<int>(q.size());
  p.Q = std::move(Q);
  p.q = std::move(q);
  p.eq_mat.resize(0, n);
  p.eq_rhs.resize(0);
  p.ineq_mat.resize(0, n);
  p.ineq_rhs.resize(0);
  p.lower = std::move(lower);
  p.upper = std::move(upper);
  return p;
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

double KktResiduals::max() const {
  return std::max({stationarity, eq_violation, ineq_violation, box_violation, complementarity});
}

std::optional<std::string> check_qp_invariants(const QpProblem& p) {
  check_dimensions(p);
  const int n = p.num_vars();
  const double asym = (p.Q - p.Q.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, p.Q.cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale) return "Q is not symmetric within tolerance";
  Eigen::MatrixXd Qs = 0.5 * (p.Q + p.Q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Qs, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8 * scale) return "Q is not positive semidefinite";
  for (int i = 0; i < n; ++i) {
    if (!(p.lower[i] <= p.upper[i])) return "lower bound exceeds upper bound at index " + std::to_string(i);
  }
  return std::nullopt;
}

KktResiduals kkt_residuals(const QpProblem& p, const QpSolution& sol) {
  KktResiduals r;
  const int n = p.num_vars();
  Eigen::MatrixXd Qs = 0.5 * (p.Q + p.Q.transpose());
  Eigen::VectorXd grad = Qs * sol.x + p.q;
  if (p.num_eq() > 0) grad += p.eq_mat.transpose() * sol.eq_duals;
  if (p.num_ineq() > 0) grad += p.ineq_mat.transpose() * sol.ineq_duals;
  grad += sol.upper_duals - sol.lower_duals;
  r.stationarity = grad.cwiseAbs().maxCoeff();

  if (p.num_eq() > 0) r.eq_violation = (p.eq_mat * sol.x - p.eq_rhs).cwiseAbs().maxCoeff();

  if (p.num_ineq() > 0) {
    const Eigen::VectorXd slack = p.ineq_rhs - p.ineq_mat * sol.x;
    r.ineq_violation = std::max(0.0, (-slack).maxCoeff());
    r.complementarity = (sol.ineq_duals.array() * slack.array()).abs().maxCoeff();
  }
  for (int i = 0; i < n; ++i) {
    if (p.lower[i] > -kInf) {
      r.box_violation = std::max(r.box_violation, p.lower[i] - sol.x[i]);
      r.complementarity = std::max(r.complementarity, std::abs(sol.lower_duals[i] * (sol.x[i] - p.lower[i])));
    }
    if (p.upper[i] < kInf) {
      r.box_violation = std::max(r.box_violation, sol.x[i] - p.upper[i]);
      r.complementarity = std::max(r.complementarity, std::abs(sol.upper_duals[i] * (p.upper[i] - sol.x[i])));
    }
  }
  r.box_violation = std::max(0.0, r.box_violation);
  return r;
}

QpSolution solve_qp(const QpProblem& p, double tol, int max_iter) {
  check_dimensions(p);
  const int n = p.num_vars();
  const int n_eq = p.num_eq();

  QpSolution sol;
  sol.x.setZero(n);
  sol.eq_duals.setZero(n_eq);
  sol.ineq_duals.setZero(p.num_ineq());
  sol.lower_duals.setZero(n);
  sol.upper_duals.setZero(n);

  for (int i = 0; i < n; ++i) {
    if (!(p.lower[i] <= p.upper[i])) {
      sol.status = QpStatus::infeasible;
      sol.message = "bounds cross at index " + std::to_string(i);
      return sol;
    }
  }

  const Eigen::MatrixXd Qs = 0.5 * (p.Q + p.Q.transpose());
  const std::vector<Row> rows = stack_inequalities(p);
  const int m = static_cast<int>(rows.size());
  const double reg = 1e-12 * std::max(1.0, Qs.cwiseAbs().maxCoeff());

  const auto finalize = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& z, int iters) {
    sol.x = x;
    sol.eq_duals = y;
    const Unstacked u = unstack_duals(rows, z, p);
    sol.ineq_duals = u.ineq;
    sol.lower_duals = u.lower;
    sol.upper_duals = u.upper;
    sol.iterations = iters;
    sol.kkt = kkt_residuals(p, sol);
  };

  if (m == 0) {
    // No inequalities: one KKT solve settles it.
    Eigen::MatrixXd K(n + n_eq, n + n_eq);
    K.setZero();
    K.topLeftCorner(n, n) = Qs;
    K.topLeftCorner(n, n).diagonal().array() += reg;
    if (n_eq > 0) {
      K.topRightCorner(n, n_eq) = p.eq_mat.transpose();
      K.bottomLeftCorner(n_eq, n) = p.eq_mat;
      K.bottomRightCorner(n_eq, n_eq).diagonal().array() -= reg;
    }
    Eigen::VectorXd rhs(n + n_eq);
    rhs.head(n) = -p.q;
    if (n_eq > 0) rhs.tail(n_eq) = p.eq_rhs;
    const Eigen::VectorXd xy = K.partialPivLu().solve(rhs);
    if (!xy.allFinite()) {
      sol.status = QpStatus::max_iter;
      sol.message = "singular KKT system";
      return sol;
    }
    finalize(xy.head(n), xy.tail(n_eq), Eigen::VectorXd(), 1);
    sol.status = sol.kkt.max() <= tol ? QpStatus::optimal : QpStatus::max_iter;
    if (sol.status != QpStatus::optimal) sol.message = "unbounded or inconsistent equality system";
    return sol;
  }

  // Interior-point state.
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    const bool lo = p.lower[i] > -kInf, hi = p.upper[i] < kInf;
    if (lo && hi) x[i] = 0.5 * (p.lower[i] + p.upper[i]);
    else if (lo) x[i] = p.lower[i] + 1.0;
    else if (hi) x[i] = p.upper[i] - 1.0;
    else x[i] = 0.0;
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_eq);
  Eigen::VectorXd s(m), z(m);
  for (int r = 0; r < m; ++r) {
    s[r] = std::max(rows[static_cast<size_t>(r)].rhs - rows[static_cast<size_t>(r)].dot(x), 1.0);
    z[r] = 1.0;
  }

  Eigen::MatrixXd K(n + n_eq, n + n_eq);
  Eigen::VectorXd rhs(n + n_eq), r_d(n), r_p(n_eq), r_g(m), gx(m), rc(m), w(m);
  Eigen::VectorXd dx(n), dy(n_eq), ds(m), dz(m), dx_c(n), ds_c(m), dz_c(m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  double best_err = kInf;
  Eigen::VectorXd best_x = x, best_y = y, best_z = z;
  int stalled = 0;

  const auto gather = [&](const Eigen::VectorXd& v) {
    for (int r = 0; r < m; ++r) gx[r] = rows[static_cast<size_t>(r)].dot(v);
  };
  const auto scatter_add = [&](const Eigen::VectorXd& coef, Eigen::VectorXd& out) {
    // out += G' * coef
    for (int r = 0; r < m; ++r)
      for (const auto& [i, c] : rows[static_cast<size_t>(r)].entries) out[i] += c * coef[r];
  };

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    gather(x);
    r_d = Qs * x + p.q;
    if (n_eq > 0) r_d += p.eq_mat.transpose() * y;
    scatter_add(z, r_d);
    if (n_eq > 0) r_p = p.eq_mat * x - p.eq_rhs;
    for (int r = 0; r < m; ++r) r_g[r] = gx[r] + s[r] - rows[static_cast<size_t>(r)].rhs;
    const double mu = s.dot(z) / m;

    const double stat = r_d.cwiseAbs().maxCoeff();
    const double eq_err = n_eq > 0 ? r_p.cwiseAbs().maxCoeff() : 0.0;
    double ineq_err = 0.0, comp_err = 0.0;
    for (int r = 0; r < m; ++r) {
      const double viol = gx[r] - rows[static_cast<size_t>(r)].rhs;
      ineq_err = std::max(ineq_err, viol);
      comp_err = std::max(comp_err, std::abs(z[r] * viol));
    }
    ineq_err = std::max(ineq_err, 0.0);
    const double total = std::max({stat, eq_err, ineq_err, comp_err});
    if (total < best_err) {
      best_err = total;
      best_x = x; best_y = y; best_z = z;
    }
    if (total <= tol) {
      finalize(x, y, z, iter);
      sol.status = QpStatus::optimal;
      return sol;
    }
    if (!x.allFinite() || !z.allFinite() || z.cwiseAbs().maxCoeff() > 1e12) break;

    // Normal matrix Q + G' diag(z/s) G, assembled row-wise.
    w = z.cwiseQuotient(s);
    K.setZero();
    K.topLeftCorner(n, n) = Qs;
    for (int r = 0; r < m; ++r) {
      const auto& e = rows[static_cast<size_t>(r)].entries;
      for (const auto& [i, ci] : e)
        for (const auto& [j, cj] : e) K(i, j) += w[r] * ci * cj;
    }
    K.topLeftCorner(n, n).diagonal().array() += reg;
    if (n_eq > 0) {
      K.topRightCorner(n, n_eq) = p.eq_mat.transpose();
      K.bottomLeftCorner(n_eq, n) = p.eq_mat;
      K.bottomRightCorner(n_eq, n_eq).setZero();
      K.bottomRightCorner(n_eq, n_eq).diagonal().array() -= reg;
    }
    lu.compute(K);

    const auto solve_direction = [&](const Eigen::VectorXd& rc_vec, Eigen::VectorXd& odx,
                                     Eigen::VectorXd& ody, Eigen::VectorXd& ods,
                                     Eigen::VectorXd& odz) {
      rhs.head(n) = -r_d;
      Eigen::VectorXd coef(m);
      for (int r = 0; r < m; ++r) coef[r] = rc_vec[r] / s[r] + w[r] * r_g[r];
      Eigen::VectorXd corr = Eigen::VectorXd::Zero(n);
      scatter_add(coef, corr);
      rhs.head(n) -= corr;
      if (n_eq > 0) rhs.tail(n_eq) = -r_p;
      const Eigen::VectorXd sol_xy = lu.solve(rhs);
      odx = sol_xy.head(n);
      ody = sol_xy.tail(n_eq);
      Eigen::VectorXd gdx(m);
      for (int r = 0; r < m; ++r) gdx[r] = rows[static_cast<size_t>(r)].dot(odx);
      ods = -r_g - gdx;
      for (int r = 0; r < m; ++r) odz[r] = (rc_vec[r] - z[r] * ods[r]) / s[r];
    };

    // Affine scaling (predictor) direction.
    rc = -(z.array() * s.array()).matrix();
    solve_direction(rc, dx, dy, ds, dz);
    if (!dx.allFinite()) break;
    const double a_p_aff = max_step(s, ds);
    const double a_d_aff = max_step(z, dz);
    const double mu_aff = (s + a_p_aff * ds).dot(z + a_d_aff * dz) / m;
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    for (int r = 0; r < m; ++r) rc[r] = sigma * mu - z[r] * s[r] - ds[r] * dz[r];
    solve_direction(rc, dx_c, dy, ds_c, dz_c);
    if (!dx_c.allFinite()) break;

    const double eta = 0.995;
    const double a_p = std::min(1.0, eta * max_step(s, ds_c));
    const double a_d = std::min(1.0, eta * max_step(z, dz_c));
    x += a_p * dx_c;
    s += a_p * ds_c;
    y += a_d * dy;
    z += a_d * dz_c;

    if (a_p < 1e-11 && a_d < 1e-11) {
      if (++stalled >= 3) break;
    } else {
      stalled = 0;
    }
  }

  finalize(best_x, best_y, best_z, iter);
  const double feas = std::max(sol.kkt.eq_violation, std::max(sol.kkt.ineq_violation, sol.kkt.box_violation));
  const double dual_mag = best_z.size() > 0 ? best_z.cwiseAbs().maxCoeff() : 0.0;
  if (feas > std::max(1e-6, 100.0 * tol) && (dual_mag > 1e8 || stalled >= 3)) {
    sol.status = QpStatus::infeasible;
    sol.message = "primal residual stalled at " + std::to_string(feas) +
                  " with diverging multipliers; problem appears infeasible";
  } else {
    sol.status = QpStatus::max_iter;
    sol.message = "iteration limit reached before certifying optimality";
  }
  return sol;
}

}  // namespace mgdispatch
