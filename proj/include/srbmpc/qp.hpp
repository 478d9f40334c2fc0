#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace srbmpc {

using SparseMat = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;

/// Standard-form convex QP:
///   min 1/2 z'Hz + g'z   s.t.  A_eq z = b_eq,  C_in z <= d_in.
/// Matrices must be compressed; H symmetric positive semi-definite.
struct QpProblem {
  SparseMat hessian;
  VecX gradient;
  SparseMat eq_matrix;
  VecX eq_rhs;
  SparseMat ineq_matrix;
  VecX ineq_rhs;

  Eigen::Index num_vars() const { return gradient.size(); }
  Eigen::Index num_eq() const { return eq_rhs.size(); }
  Eigen::Index num_ineq() const { return ineq_rhs.size(); }

  void validate() const {
    const Eigen::Index n = num_vars();
    if (hessian.rows() != n || hessian.cols() != n) {
      throw std::invalid_argument("QpProblem: hessian dimension mismatch");
    }
    if (eq_matrix.rows() != num_eq() || (num_eq() > 0 && eq_matrix.cols() != n)) {
      throw std::invalid_argument("QpProblem: equality dimension mismatch");
    }
    if (ineq_matrix.rows() != num_ineq() || (num_ineq() > 0 && ineq_matrix.cols() != n)) {
      throw std::invalid_argument("QpProblem: inequality dimension mismatch");
    }
    if (!hessian.isCompressed() || !eq_matrix.isCompressed() || !ineq_matrix.isCompressed()) {
      throw std::invalid_argument("QpProblem: matrices must be compressed");
    }
    auto finite = [](const SparseMat& m) {
      for (Eigen::Index k = 0; k < m.nonZeros(); ++k) {
        if (!std::isfinite(m.valuePtr()[k])) return false;
      }
      return true;
    };
    if (!finite(hessian) || !finite(eq_matrix) || !finite(ineq_matrix) ||
        !gradient.allFinite() || !eq_rhs.allFinite() || !ineq_rhs.allFinite()) {
      throw std::invalid_argument("QpProblem: non-finite entries");
    }
    const SparseMat asym = SparseMat(hessian.transpose()) - hessian;
    for (Eigen::Index k = 0; k < asym.nonZeros(); ++k) {
      if (std::abs(asym.valuePtr()[k]) > 1e-12) {
        throw std::invalid_argument("QpProblem: hessian not symmetric");
      }
    }
  }

  /// True when `other` has identical dimensions and sparsity patterns.
  bool same_structure(const QpProblem& other) const {
    auto same_pattern = [](const SparseMat& a, const SparseMat& b) {
      if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) {
        return false;
      }
      if (!std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1,
                      b.outerIndexPtr())) {
        return false;
      }
      return std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(),
                        b.innerIndexPtr());
    };
    return num_vars() == other.num_vars() && num_eq() == other.num_eq() &&
           num_ineq() == other.num_ineq() && same_pattern(hessian, other.hessian) &&
           same_pattern(eq_matrix, other.eq_matrix) &&
           same_pattern(ineq_matrix, other.ineq_matrix);
  }
};

enum class SolveStatus { kOptimal, kMaxIter, kInfeasible, kNumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

struct KktResidual {
  double stationarity = 0.0;
  double primal_eq = 0.0;
  double primal_ineq = 0.0;
  double complementarity = 0.0;

  double max_norm() const {
    return std::max({stationarity, primal_eq, primal_ineq, complementarity});
  }
};

struct QpSolution {
  VecX primal;
  VecX eq_dual;
  VecX ineq_dual;
  SolveStatus status = SolveStatus::kNumericalFailure;
  int iterations = 0;
  KktResidual kkt;

  double objective(const QpProblem& p) const {
    return 0.5 * primal.dot(p.hessian * primal) + p.gradient.dot(primal);
  }
};

struct SolverSettings {
  double tol = 1e-6;
  int max_iter = 50;
  double reg = 1e-9;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SolverSettings: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolverSettings: max_iter must be >= 1");
    if (!(reg > 0.0)) throw std::invalid_argument("SolverSettings: reg must be > 0");
  }
};

/// Infinity norms of the four first-order optimality residuals at (z, lam, mu):
/// stationarity Hz + g + A'lam + C'mu, equality violation, positive part of
/// C z - d, and complementarity mu o (d - C z).
inline KktResidual kkt_residual(const QpProblem& p, const VecX& z, const VecX& lam,
                                const VecX& mu) {
  if (z.size() != p.num_vars() || lam.size() != p.num_eq() || mu.size() != p.num_ineq()) {
    throw std::invalid_argument("kkt_residual: dimension mismatch");
  }
  KktResidual r;
  VecX stat = p.hessian * z + p.gradient;
  if (p.num_eq() > 0) stat += p.eq_matrix.transpose() * lam;
  if (p.num_ineq() > 0) stat += p.ineq_matrix.transpose() * mu;
  r.stationarity = stat.size() ? stat.lpNorm<Eigen::Infinity>() : 0.0;
  if (p.num_eq() > 0) {
    r.primal_eq = (p.eq_matrix * z - p.eq_rhs).lpNorm<Eigen::Infinity>();
  }
  if (p.num_ineq() > 0) {
    const VecX gap = p.ineq_rhs - p.ineq_matrix * z;
    r.primal_ineq = (-gap).cwiseMax(0.0).lpNorm<Eigen::Infinity>();
    r.complementarity = mu.cwiseProduct(gap).lpNorm<Eigen::Infinity>();
  }
  return r;
}

inline KktResidual kkt_residual(const QpProblem& p, const QpSolution& sol) {
  return kkt_residual(p, sol.primal, sol.eq_dual, sol.ineq_dual);
}

/// Mehrotra predictor-corrector primal-dual interior point solver.
///
/// One sparse symmetric indefinite factorization per iteration of the
/// regularized reduced KKT system
///   [ H + C' W C + eps I    A'     ] [dz  ]
///   [ A                   -eps I   ] [dlam]
/// (lower triangle, LDL') with W = diag(mu / s). The KKT sparsity pattern,
/// the contribution maps into it, and the symbolic factorization are built
/// once per problem structure and reused across solves with the same
/// structure; this is what makes batching over identical-shape problems
/// cheaper than independent solves.
class IpmSolver {
 public:
  explicit IpmSolver(const SolverSettings& settings = {}) : settings_(settings) {
    settings_.validate();
  }

  const SolverSettings& settings() const { return settings_; }

  /// Barrier parameter after each accepted iterate of the last solve.
  const std::vector<double>& barrier_trace() const { return barrier_trace_; }

  QpSolution solve(const QpProblem& p) {
    p.validate();
    if (!structured_ || !reference_.same_structure(p)) prepare_structure(p);
    load_values(p);

    const Eigen::Index n = p.num_vars(), me = p.num_eq(), mi = p.num_ineq();
    VecX z = VecX::Zero(n);
    VecX lam = VecX::Zero(me);
    VecX mu = VecX::Ones(mi);
    VecX s(mi);
    for (Eigen::Index i = 0; i < mi; ++i) s(i) = std::max(1.0, p.ineq_rhs(i));

    QpSolution sol;
    double mu_bar = mi > 0 ? s.dot(mu) / double(mi) : 0.0;
    int stall_count = 0;
    int no_progress = 0;
    double best_infeas = std::numeric_limits<double>::infinity();
    barrier_trace_.clear();
    if (mi > 0) barrier_trace_.push_back(mu_bar);

    for (int iter = 0; iter <= settings_.max_iter; ++iter) {
      // Optimality check on the same four norms the external verifier uses.
      VecX stat = p.hessian * z + p.gradient;
      if (me > 0) stat += p.eq_matrix.transpose() * lam;
      if (mi > 0) stat += p.ineq_matrix.transpose() * mu;
      KktResidual res;
      res.stationarity = n > 0 ? stat.lpNorm<Eigen::Infinity>() : 0.0;
      if (me > 0) res.primal_eq = (p.eq_matrix * z - p.eq_rhs).lpNorm<Eigen::Infinity>();
      if (mi > 0) {
        const VecX gap = p.ineq_rhs - p.ineq_matrix * z;
        res.primal_ineq = (-gap).cwiseMax(0.0).lpNorm<Eigen::Infinity>();
        res.complementarity = mu.cwiseProduct(gap).lpNorm<Eigen::Infinity>();
      }
      sol.primal = z;
      sol.eq_dual = lam;
      sol.ineq_dual = mu;
      sol.iterations = iter;
      sol.kkt = res;
      if (res.max_norm() <= settings_.tol) {
        sol.status = SolveStatus::kOptimal;
        return sol;
      }
      const double primal_infeas = std::max(res.primal_eq, res.primal_ineq);
      const double dual_norm =
          std::max(me > 0 ? lam.lpNorm<Eigen::Infinity>() : 0.0,
                   mi > 0 ? mu.lpNorm<Eigen::Infinity>() : 0.0);
      if (dual_norm > 1e10) {
        sol.status = primal_infeas > settings_.tol ? SolveStatus::kInfeasible
                                                   : SolveStatus::kNumericalFailure;
        return sol;
      }
      // Primal infeasibility that stops improving well away from the
      // tolerance is an infeasibility certificate in all but name.
      if (primal_infeas > std::max(1e2 * settings_.tol, 1e-4)) {
        no_progress = primal_infeas > 0.999 * best_infeas ? no_progress + 1 : 0;
        best_infeas = std::min(best_infeas, primal_infeas);
        if (no_progress >= 8) {
          sol.status = SolveStatus::kInfeasible;
          return sol;
        }
      } else {
        no_progress = 0;
      }
      if (iter == settings_.max_iter) break;

      // Assemble and factor, retrying with heavier regularization on failure.
      const VecX w = mi > 0 ? VecX(mu.cwiseQuotient(s)) : VecX();
      double eps = settings_.reg;
      bool factored = false;
      for (int attempt = 0; attempt < 4; ++attempt) {
        refresh_kkt(w, eps);
        ldlt_.factorize(kkt_);
        if (ldlt_.info() == Eigen::Success) {
          factored = true;
          break;
        }
        eps *= 10.0;
      }
      if (!factored) {
        sol.status = SolveStatus::kNumericalFailure;
        return sol;
      }

      const VecX r_d = stat;
      const VecX r_e = me > 0 ? VecX(p.eq_matrix * z - p.eq_rhs) : VecX();
      const VecX r_i = mi > 0 ? VecX(p.ineq_matrix * z + s - p.ineq_rhs) : VecX();

      const auto kkt_solve = [&](const VecX& r_comp, VecX& dz, VecX& dlam, VecX& dmu,
                                 VecX& ds) {
        VecX rhs(n + me);
        VecX rz = -r_d;
        if (mi > 0) {
          rz -= p.ineq_matrix.transpose() *
                VecX((mu.cwiseProduct(r_i) - r_comp).cwiseQuotient(s));
        }
        rhs.head(n) = rz;
        if (me > 0) rhs.tail(me) = -r_e;
        const VecX step = ldlt_.solve(rhs);
        dz = step.head(n);
        dlam = me > 0 ? VecX(step.tail(me)) : VecX();
        if (mi > 0) {
          const VecX c_dz = p.ineq_matrix * dz;
          dmu = (mu.cwiseProduct(r_i + c_dz) - r_comp).cwiseQuotient(s);
          ds = -r_i - c_dz;
        }
      };

      const auto max_step = [](const VecX& v, const VecX& dv) {
        double a = 1.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
        }
        return a;
      };

      VecX dz, dlam, dmu, ds;
      if (mi > 0) {
        // Affine predictor.
        kkt_solve(VecX(s.cwiseProduct(mu)), dz, dlam, dmu, ds);
        if (!dz.allFinite() || !dmu.allFinite()) {
          sol.status = SolveStatus::kNumericalFailure;
          return sol;
        }
        const double ap = max_step(s, ds), ad = max_step(mu, dmu);
        const double mu_aff = (s + ap * ds).dot(mu + ad * dmu) / double(mi);
        const double ratio = std::clamp(mu_aff / std::max(mu_bar, 1e-300), 0.0, 1.0);
        const double sigma_mu = ratio * ratio * ratio * mu_bar;
        // Corrector with the second-order complementarity term.
        kkt_solve(VecX(s.cwiseProduct(mu) + ds.cwiseProduct(dmu) -
                       VecX::Constant(mi, sigma_mu)),
                  dz, dlam, dmu, ds);
      } else {
        kkt_solve(VecX(), dz, dlam, dmu, ds);
      }
      if (!dz.allFinite() || (me > 0 && !dlam.allFinite()) ||
          (mi > 0 && (!dmu.allFinite() || !ds.allFinite()))) {
        sol.status = SolveStatus::kNumericalFailure;
        return sol;
      }

      const double tau = 0.995;
      double alpha_p = mi > 0 ? std::min(1.0, tau * max_step(s, ds)) : 1.0;
      double alpha_d = mi > 0 ? std::min(1.0, tau * max_step(mu, dmu)) : 1.0;

      // Keep the barrier parameter non-increasing across accepted iterates.
      if (mi > 0) {
        for (int bt = 0; bt < 40; ++bt) {
          const double mu_next = (s + alpha_p * ds).dot(mu + alpha_d * dmu) / double(mi);
          if (mu_next <= mu_bar * (1.0 + 1e-12)) break;
          alpha_p *= 0.7;
          alpha_d *= 0.7;
        }
      }

      z += alpha_p * dz;
      if (me > 0) lam += alpha_d * dlam;
      if (mi > 0) {
        s += alpha_p * ds;
        mu += alpha_d * dmu;
        mu_bar = s.dot(mu) / double(mi);
        barrier_trace_.push_back(mu_bar);
      }

      if (std::max(alpha_p, alpha_d) < 1e-10) {
        if (++stall_count >= 2) {
          sol.status = primal_infeas > std::sqrt(settings_.tol)
                           ? SolveStatus::kInfeasible
                           : SolveStatus::kNumericalFailure;
          sol.primal = z;
          sol.eq_dual = lam;
          sol.ineq_dual = mu;
          return sol;
        }
      } else {
        stall_count = 0;
      }
    }
    sol.status = SolveStatus::kMaxIter;
    return sol;
  }

 private:
  struct CtcEntry {
    int target;  // index into the KKT value array
    int row;     // inequality row supplying the barrier weight
    int val_a;   // indices into the inequality value array
    int val_b;
  };

  void prepare_structure(const QpProblem& p) {
    const Eigen::Index n = p.num_vars(), me = p.num_eq(), mi = p.num_ineq();
    const Eigen::Index dim = n + me;

    // Row-wise view of the inequality matrix: (column, flat value index).
    std::vector<std::vector<std::pair<int, int>>> rows(static_cast<size_t>(mi));
    for (int col = 0; col < p.ineq_matrix.outerSize(); ++col) {
      for (int k = p.ineq_matrix.outerIndexPtr()[col];
           k < p.ineq_matrix.outerIndexPtr()[col + 1]; ++k) {
        rows[size_t(p.ineq_matrix.innerIndexPtr()[k])].emplace_back(col, k);
      }
    }

    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < dim; ++i) trips.emplace_back(int(i), int(i), 0.0);
    for (int col = 0; col < p.hessian.outerSize(); ++col) {
      for (int k = p.hessian.outerIndexPtr()[col]; k < p.hessian.outerIndexPtr()[col + 1];
           ++k) {
        const int row = p.hessian.innerIndexPtr()[k];
        if (row >= col) trips.emplace_back(row, col, 0.0);
      }
    }
    for (int col = 0; col < p.eq_matrix.outerSize(); ++col) {
      for (int k = p.eq_matrix.outerIndexPtr()[col]; k < p.eq_matrix.outerIndexPtr()[col + 1];
           ++k) {
        trips.emplace_back(int(n) + p.eq_matrix.innerIndexPtr()[k], col, 0.0);
      }
    }
    for (const auto& row : rows) {
      for (size_t a = 0; a < row.size(); ++a) {
        for (size_t b = 0; b <= a; ++b) {
          trips.emplace_back(std::max(row[a].first, row[b].first),
                             std::min(row[a].first, row[b].first), 0.0);
        }
      }
    }
    kkt_.resize(dim, dim);
    kkt_.setFromTriplets(trips.begin(), trips.end());
    kkt_.makeCompressed();

    const auto flat_index = [&](int row, int col) {
      const int* base = kkt_.innerIndexPtr();
      const int* begin = base + kkt_.outerIndexPtr()[col];
      const int* end = base + kkt_.outerIndexPtr()[col + 1];
      return int(std::lower_bound(begin, end, row) - base);
    };

    diag_idx_.resize(size_t(dim));
    for (Eigen::Index i = 0; i < dim; ++i) diag_idx_[size_t(i)] = flat_index(int(i), int(i));

    h_map_.clear();
    for (int col = 0; col < p.hessian.outerSize(); ++col) {
      for (int k = p.hessian.outerIndexPtr()[col]; k < p.hessian.outerIndexPtr()[col + 1];
           ++k) {
        const int row = p.hessian.innerIndexPtr()[k];
        if (row >= col) h_map_.emplace_back(flat_index(row, col), k);
      }
    }
    a_map_.clear();
    for (int col = 0; col < p.eq_matrix.outerSize(); ++col) {
      for (int k = p.eq_matrix.outerIndexPtr()[col]; k < p.eq_matrix.outerIndexPtr()[col + 1];
           ++k) {
        a_map_.emplace_back(flat_index(int(n) + p.eq_matrix.innerIndexPtr()[k], col), k);
      }
    }
    ctc_.clear();
    for (int r = 0; r < int(mi); ++r) {
      const auto& row = rows[size_t(r)];
      for (size_t a = 0; a < row.size(); ++a) {
        for (size_t b = 0; b <= a; ++b) {
          const int hi = std::max(row[a].first, row[b].first);
          const int lo = std::min(row[a].first, row[b].first);
          ctc_.push_back({flat_index(hi, lo), r, row[a].second, row[b].second});
        }
      }
    }

    base_values_.assign(size_t(kkt_.nonZeros()), 0.0);
    ldlt_.analyzePattern(kkt_);
    reference_ = p;  // keeps the pattern for structure comparison
    num_vars_ = n;
    structured_ = true;
  }

  void load_values(const QpProblem& p) {
    std::fill(base_values_.begin(), base_values_.end(), 0.0);
    for (const auto& [target, src] : h_map_) base_values_[size_t(target)] += p.hessian.valuePtr()[src];
    for (const auto& [target, src] : a_map_) base_values_[size_t(target)] += p.eq_matrix.valuePtr()[src];
    ctc_coef_.resize(ctc_.size());
    for (size_t k = 0; k < ctc_.size(); ++k) {
      ctc_coef_[k] =
          p.ineq_matrix.valuePtr()[ctc_[k].val_a] * p.ineq_matrix.valuePtr()[ctc_[k].val_b];
    }
  }

  void refresh_kkt(const VecX& w, double eps) {
    double* vals = kkt_.valuePtr();
    std::copy(base_values_.begin(), base_values_.end(), vals);
    for (Eigen::Index i = 0; i < Eigen::Index(diag_idx_.size()); ++i) {
      vals[diag_idx_[size_t(i)]] += (i < num_vars_) ? eps : -eps;
    }
    for (size_t k = 0; k < ctc_.size(); ++k) {
      vals[ctc_[k].target] += w(ctc_[k].row) * ctc_coef_[k];
    }
  }

  SolverSettings settings_;
  bool structured_ = false;
  QpProblem reference_;
  SparseMat kkt_;
  Eigen::SimplicialLDLT<SparseMat, Eigen::Lower> ldlt_;
  std::vector<int> diag_idx_;
  std::vector<std::pair<int, int>> h_map_;  // (kkt value index, source value index)
  std::vector<std::pair<int, int>> a_map_;
  std::vector<CtcEntry> ctc_;
  std::vector<double> ctc_coef_;
  std::vector<double> base_values_;
  std::vector<double> barrier_trace_;
  Eigen::Index num_vars_ = 0;
};

/// One-shot solve with a fresh solver (cold start).
inline QpSolution solve(const QpProblem& p, const SolverSettings& settings = {}) {
  IpmSolver solver(settings);
  return solver.solve(p);
}

}  // namespace srbmpc
