#pragma once

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <vector>

#include "srbmpc/qp.hpp"

namespace srbmpc::testing {

/// Dense mirror of QpProblem for the test-side oracles. Kept independent of
/// the solver's sparse machinery on purpose.
struct DenseQp {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_rhs;
};

inline DenseQp to_dense(const QpProblem& p) {
  DenseQp d;
  d.hessian = Eigen::MatrixXd(p.hessian);
  d.gradient = p.gradient;
  d.eq_matrix = Eigen::MatrixXd(p.eq_matrix);
  d.eq_rhs = p.eq_rhs;
  d.ineq_matrix = Eigen::MatrixXd(p.ineq_matrix);
  d.ineq_rhs = p.ineq_rhs;
  return d;
}

inline QpProblem to_sparse(const DenseQp& d) {
  QpProblem p;
  p.hessian = d.hessian.sparseView();
  p.gradient = d.gradient;
  p.eq_matrix = d.eq_matrix.sparseView();
  p.eq_rhs = d.eq_rhs;
  p.ineq_matrix = d.ineq_matrix.sparseView();
  p.ineq_rhs = d.ineq_rhs;
  p.hessian.makeCompressed();
  p.eq_matrix.makeCompressed();
  p.ineq_matrix.makeCompressed();
  return p;
}

struct OracleSolution {
  Eigen::VectorXd primal;
  double objective = 0.0;
};

/// Solves the equality-constrained KKT system for one candidate active set
/// and accepts it only if the resulting point passes every first-order
/// optimality condition by direct dense arithmetic. KKT sufficiency for a
/// convex QP makes an accepted point globally optimal no matter how the
/// candidate set was chosen.
inline std::optional<OracleSolution> check_active_set(const DenseQp& qp,
                                                      const std::vector<int>& active,
                                                      double tol = 1e-8) {
  const Eigen::Index n = qp.gradient.size();
  const Eigen::Index me = qp.eq_rhs.size();
  const Eigen::Index ma = Eigen::Index(active.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + me + ma, n + me + ma);
  Eigen::VectorXd rhs(n + me + ma);
  kkt.topLeftCorner(n, n) = qp.hessian;
  rhs.head(n) = -qp.gradient;
  if (me > 0) {
    kkt.block(n, 0, me, n) = qp.eq_matrix;
    kkt.block(0, n, n, me) = qp.eq_matrix.transpose();
    rhs.segment(n, me) = qp.eq_rhs;
  }
  for (Eigen::Index k = 0; k < ma; ++k) {
    kkt.block(n + me + k, 0, 1, n) = qp.ineq_matrix.row(active[size_t(k)]);
    kkt.block(0, n + me + k, n, 1) = qp.ineq_matrix.row(active[size_t(k)]).transpose();
    rhs(n + me + k) = qp.ineq_rhs(active[size_t(k)]);
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::VectorXd sol = lu.solve(rhs);
  if ((kkt * sol - rhs).lpNorm<Eigen::Infinity>() > tol) return std::nullopt;

  const Eigen::VectorXd z = sol.head(n);
  const Eigen::VectorXd mu_active = sol.tail(ma);
  if ((mu_active.array() < -tol).any()) return std::nullopt;
  if (qp.ineq_rhs.size() > 0) {
    const Eigen::VectorXd slack = qp.ineq_rhs - qp.ineq_matrix * z;
    if ((slack.array() < -tol).any()) return std::nullopt;
  }
  return OracleSolution{z, 0.5 * z.dot(qp.hessian * z) + qp.gradient.dot(z)};
}

/// Brute-force enumeration over all active sets; intended for small
/// instances (m_i <= ~16).
inline std::optional<OracleSolution> active_set_enumeration(const DenseQp& qp,
                                                            double tol = 1e-8) {
  const int mi = int(qp.ineq_rhs.size());
  for (unsigned long mask = 0; mask < (1ul << mi); ++mask) {
    std::vector<int> active;
    for (int j = 0; j < mi; ++j) {
      if (mask & (1ul << j)) active.push_back(j);
    }
    if (auto sol = check_active_set(qp, active, tol)) return sol;
  }
  return std::nullopt;
}

/// Random strictly convex QP that is feasible by construction: rhs vectors
/// are generated from a known interior point.
inline DenseQp random_feasible_qp(std::mt19937_64& rng, int n, int me, int mi) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.05, 1.0);
  const auto mat = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m(i, j) = unit(rng);
    }
    return m;
  };
  DenseQp qp;
  const Eigen::MatrixXd l = mat(n, n);
  qp.hessian = l * l.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  qp.gradient = mat(n, 1);
  const Eigen::VectorXd interior = mat(n, 1);
  qp.eq_matrix = mat(me, n);
  qp.eq_rhs = qp.eq_matrix * interior;
  qp.ineq_matrix = mat(mi, n);
  qp.ineq_rhs = qp.ineq_matrix * interior;
  for (int i = 0; i < mi; ++i) qp.ineq_rhs(i) += pos(rng);
  return qp;
}

}  // namespace srbmpc::testing
