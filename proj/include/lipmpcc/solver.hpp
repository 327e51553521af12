// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_SOLVER_HPP
#define LIPMPCC_SOLVER_HPP

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "lipmpcc/ocp.hpp"
#include "lipmpcc/qp.hpp"

namespace lipmpcc {

struct SolverConfig {
  int max_iterations = 50;
  double kkt_tolerance = 1e-6;
  double constraint_tolerance = 1e-8;
  double regularization_floor = 1e-6;
  double line_search_backtrack = 0.5;  // in (0,1)
  double sufficient_decrease = 1e-4;   // Armijo coefficient
  double merit_penalty_init = 1.0;
  double merit_penalty_margin = 2.0;   // mu >= margin * |lambda|_inf
  int max_line_search = 40;

  void validate() const {
    if (!(kkt_tolerance > 0.0 && constraint_tolerance > 0.0 &&
          regularization_floor > 0.0)) {
      throw std::invalid_argument("SolverConfig: tolerances must be > 0");
    }
    if (!(line_search_backtrack > 0.0 && line_search_backtrack < 1.0) ||
        !(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
      throw std::invalid_argument("SolverConfig: factors must be in (0,1)");
    }
  }
};

enum class SolveStatus { optimal, max_iter, infeasible_detected, numerical_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible_detected: return "infeasible_detected";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct SolveResult {
  VectorXd z;
  SolveStatus status = SolveStatus::numerical_failure;
  double kkt_residual = std::numeric_limits<double>::infinity();
  double constraint_violation = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double solve_time = 0.0; // seconds
  double objective = std::numeric_limits<double>::infinity();
};

/// SQP with Gauss-Newton curvature, an l1 merit line search and a dual
/// active-set QP subproblem. The concave progress term enters the QP with
/// its exact negative curvature; an eigenvalue floor keeps the QP convex.
class SqpSolver {
 public:
  explicit SqpSolver(SolverConfig config = {}) : cfg_(config) {
    cfg_.validate();
  }

  SolveResult solve(const Nlp& nlp, const VectorXd& z0) const {
    const auto t_start = std::chrono::steady_clock::now();
    const int n = nlp.dim();
    const int m = nlp.num_constraints();
    const VectorXd lo = nlp.lower_bound();
    const VectorXd hi = nlp.upper_bound();

    SolveResult res;
    VectorXd z = z0.cwiseMax(lo).cwiseMin(hi);
    double mu = cfg_.merit_penalty_init;

    VectorXd best_feasible;
    double best_feasible_cost = std::numeric_limits<double>::infinity();

    VectorXd g(n), c(m);
    MatrixXd Jc(m, n);
    VectorXd lambda_prev;
    double stall_viol = std::numeric_limits<double>::infinity();
    int stall_count = 0;
    bool used_elastic = false;

    int it = 0;
    for (; it < cfg_.max_iterations; ++it) {
      const double f = nlp.eval_cost(z, &g);
      nlp.eval_constraints(z, c, &Jc);
      if (!std::isfinite(f) || !g.allFinite() || !c.allFinite() ||
          !Jc.allFinite()) {
        res.status = SolveStatus::numerical_failure;
        break;
      }
      const double viol_sum = (-c.cwiseMin(0.0)).sum();
      const double viol_max = (-c.cwiseMin(0.0)).maxCoeff();
      if (viol_max <= cfg_.constraint_tolerance && f < best_feasible_cost) {
        best_feasible = z;
        best_feasible_cost = f;
      }

      // Gauss-Newton plus the multiplier-weighted constraint curvature.
      // Without the lambda' c'' term the distance and barrier constraints
      // (both quadratic) degrade convergence to a slow linear rate.
      MatrixXd Hl = nlp.gauss_newton_hessian(z);
      if (m > 0 && lambda_prev.size() == m &&
          lambda_prev.lpNorm<Eigen::Infinity>() > 0.0) {
        Hl -= constraint_curvature(nlp, z, lambda_prev);
      }
      MatrixXd H = regularized_hessian(Hl);

      // QP in the step p: min 1/2 p'Hp + g'p s.t. Jc p + c >= 0 and box.
      VectorXd p, lambda;
      bool qp_ok = solve_qp(H, g, Jc, c, z, lo, hi, p, lambda);
      if (!qp_ok) {
        used_elastic = true;
        qp_ok = solve_elastic_qp(H, g, Jc, c, z, lo, hi, mu, p, lambda);
        if (!qp_ok) {
          res.status = SolveStatus::numerical_failure;
          break;
        }
        if (viol_max > cfg_.constraint_tolerance) {
          if (viol_max >= stall_viol * 0.999) {
            if (++stall_count >= 5) {
              res.status = SolveStatus::infeasible_detected;
              break;
            }
          } else {
            stall_count = 0;
          }
          stall_viol = std::min(stall_viol, viol_max);
        }
      }

      lambda_prev = lambda;

      // KKT residual from the QP multipliers: the QP stationarity condition
      // makes g - J'lambda (including bounds) equal to -Hp. Both parts are
      // scaled by the dual magnitude so the test stays meaningful when the
      // weights push gradients and multipliers to 1e3 and beyond.
      const double stat = (H * p).lpNorm<Eigen::Infinity>();
      double comp = 0.0;
      for (int i = 0; i < m; ++i) comp = std::max(comp, std::abs(lambda(i) * c(i)));
      const double lam_max = (m > 0) ? lambda.lpNorm<Eigen::Infinity>() : 0.0;
      const double dual_scale =
          1.0 + std::max(g.lpNorm<Eigen::Infinity>(), lam_max);
      const double kkt = std::max(stat, comp) / dual_scale;
      res.kkt_residual = kkt;

      if (viol_max <= cfg_.constraint_tolerance && kkt <= cfg_.kkt_tolerance) {
        res.status = SolveStatus::optimal;
        break;
      }
      // A step at rounding level cannot improve the iterate further; with a
      // feasible point this is convergence to working precision.
      if (viol_max <= cfg_.constraint_tolerance &&
          p.lpNorm<Eigen::Infinity>() <=
              1e-11 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
        res.status = SolveStatus::optimal;
        break;
      }

      // l1 merit with adaptive penalty. The penalty tracks the current
      // multipliers with hysteresis: a stale, oversized mu from early
      // iterations would otherwise magnify the O(alpha^2) constraint
      // curvature at trial points and force crawling step sizes.
      const double lam_inf =
          (m > 0) ? lambda.lpNorm<Eigen::Infinity>() : 0.0;
      const double mu_target = cfg_.merit_penalty_margin * lam_inf + 1e-6;
      if (mu < mu_target) {
        mu = mu_target;
      } else if (mu > 100.0 * mu_target) {
        mu = 100.0 * mu_target;
      }
      double dir = g.dot(p) - mu * viol_sum;
      if (dir >= 0.0 && viol_sum > 1e-16) {
        mu = std::max(mu, 2.0 * g.dot(p) / viol_sum + 1.0);
        dir = g.dot(p) - mu * viol_sum;
      }

      const double merit0 = f + mu * viol_sum;
      double alpha = 1.0;
      bool accepted = false;
      VectorXd c_trial(m);
      for (int ls = 0; ls < cfg_.max_line_search; ++ls) {
        const VectorXd z_trial = (z + alpha * p).cwiseMax(lo).cwiseMin(hi);
        const double f_trial = nlp.eval_cost(z_trial);
        nlp.eval_constraints(z_trial, c_trial);
        if (std::isfinite(f_trial) && c_trial.allFinite()) {
          const double merit_trial =
              f_trial + mu * (-c_trial.cwiseMin(0.0)).sum();
          if (merit_trial <= merit0 + cfg_.sufficient_decrease * alpha * dir) {
            z = z_trial;
            accepted = true;
            break;
          }
          // Second-order correction against the Maratos effect: retract the
          // constraint curvature picked up over the full step before giving
          // up on it and backtracking.
          if (ls == 0 && m > 0) {
            const VectorXd z_soc = soc_trial(nlp, z, p, c_trial, Jc, lo, hi);
            const double f_soc = nlp.eval_cost(z_soc);
            VectorXd c_soc(m);
            nlp.eval_constraints(z_soc, c_soc);
            if (std::isfinite(f_soc) && c_soc.allFinite()) {
              const double merit_soc =
                  f_soc + mu * (-c_soc.cwiseMin(0.0)).sum();
              if (merit_soc <= merit0 + cfg_.sufficient_decrease * dir) {
                z = z_soc;
                accepted = true;
                break;
              }
            }
          }
        }
        alpha *= cfg_.line_search_backtrack;
      }
      if (!accepted) {
        // Step rejected everywhere along the direction; stop here.
        res.status = (viol_max <= cfg_.constraint_tolerance)
                         ? SolveStatus::max_iter
                         : SolveStatus::infeasible_detected;
        break;
      }
    }

    if (it == cfg_.max_iterations) res.status = SolveStatus::max_iter;
    res.iterations = std::min(it + 1, cfg_.max_iterations);

    if (res.status == SolveStatus::max_iter && best_feasible.size() > 0) {
      z = best_feasible;
    }
    res.z = z;
    // Independent feasibility re-check, not the loop's bookkeeping.
    VectorXd c_final;
    nlp.eval_constraints(res.z, c_final);
    res.constraint_violation =
        (c_final.size() > 0) ? (-c_final.cwiseMin(0.0)).maxCoeff() : 0.0;
    res.objective = nlp.eval_cost(res.z);
    if (res.status == SolveStatus::optimal &&
        res.constraint_violation > cfg_.constraint_tolerance) {
      res.status = SolveStatus::max_iter;
    }
    (void)used_elastic;
    res.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return res;
  }

  const SolverConfig& config() const { return cfg_; }

 private:
  // Hessian of lambda' c by central differences of the Jacobian-vector
  // product; the constraint set is low-dimensional so this stays cheap.
  static MatrixXd constraint_curvature(const Nlp& nlp, const VectorXd& z,
                                       const VectorXd& lambda) {
    const int n = static_cast<int>(z.size());
    const int m = static_cast<int>(lambda.size());
    const double h = 1e-6;
    MatrixXd W(n, n);
    VectorXd c(m);
    MatrixXd Jp(m, n), Jm(m, n);
    VectorXd zt = z;
    for (int j = 0; j < n; ++j) {
      const double zj = zt(j);
      zt(j) = zj + h;
      nlp.eval_constraints(zt, c, &Jp);
      zt(j) = zj - h;
      nlp.eval_constraints(zt, c, &Jm);
      zt(j) = zj;
      W.col(j) = (Jp - Jm).transpose() * lambda / (2.0 * h);
    }
    return 0.5 * (W + W.transpose());
  }

  // Least-norm correction d with J_A d = -c_A(z + p) on the rows violated at
  // the trial point, evaluated with the Jacobian from the current iterate.
  static VectorXd soc_trial(const Nlp&, const VectorXd& z, const VectorXd& p,
                            const VectorXd& c_trial, const MatrixXd& Jc,
                            const VectorXd& lo, const VectorXd& hi) {
    const int m = static_cast<int>(c_trial.size());
    std::vector<int> act;
    for (int i = 0; i < m; ++i) {
      if (c_trial(i) < 0.0) act.push_back(i);
    }
    VectorXd d = VectorXd::Zero(z.size());
    if (!act.empty()) {
      const int na = static_cast<int>(act.size());
      MatrixXd JA(na, z.size());
      VectorXd rA(na);
      for (int j = 0; j < na; ++j) {
        JA.row(j) = Jc.row(act[j]);
        rA(j) = -c_trial(act[j]);
      }
      MatrixXd JJt = JA * JA.transpose();
      JJt.diagonal().array() += 1e-12;
      d = JA.transpose() * JJt.ldlt().solve(rA);
    }
    return (z + p + d).cwiseMax(lo).cwiseMin(hi);
  }

  MatrixXd regularized_hessian(const MatrixXd& H) const {
    const MatrixXd Hs = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Hs);
    VectorXd ev = es.eigenvalues().cwiseMax(cfg_.regularization_floor);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  }

  static void append_box_rows(const VectorXd& z, const VectorXd& lo,
                              const VectorXd& hi, int offset, MatrixXd& CI,
                              VectorXd& ci, int& col) {
    const int n = static_cast<int>(z.size());
    for (int k = 0; k < n; ++k) {
      if (lo(k) > -1e19) {
        CI(offset + k, col) = 1.0;
        ci(col) = z(k) - lo(k);
        ++col;
      }
      if (hi(k) < 1e19) {
        CI(offset + k, col) = -1.0;
        ci(col) = hi(k) - z(k);
        ++col;
      }
    }
  }

  bool solve_qp(const MatrixXd& H, const VectorXd& g, const MatrixXd& Jc,
                const VectorXd& c, const VectorXd& z, const VectorXd& lo,
                const VectorXd& hi, VectorXd& p, VectorXd& lambda) const {
    const int n = static_cast<int>(z.size());
    const int m = static_cast<int>(c.size());
    int nbox = 0;
    for (int k = 0; k < n; ++k) {
      if (lo(k) > -1e19) ++nbox;
      if (hi(k) < 1e19) ++nbox;
    }
    MatrixXd CI = MatrixXd::Zero(n, m + nbox);
    VectorXd ci(m + nbox);
    CI.leftCols(m) = Jc.transpose();
    ci.head(m) = c;
    int col = m;
    append_box_rows(z, lo, hi, 0, CI, ci, col);

    const QpResult qr = DenseQp::solve(H, g, CI, ci);
    if (!qr.feasible) return false;
    p = qr.x;
    lambda = qr.lambda.head(m);
    return true;
  }

  // Elastic relaxation: slacks on the general constraints with an l1-style
  // penalty (plus a tiny quadratic term to keep the QP strictly convex).
  bool solve_elastic_qp(const MatrixXd& H, const VectorXd& g,
                        const MatrixXd& Jc, const VectorXd& c,
                        const VectorXd& z, const VectorXd& lo,
                        const VectorXd& hi, double mu, VectorXd& p,
                        VectorXd& lambda) const {
    const int n = static_cast<int>(z.size());
    const int m = static_cast<int>(c.size());
    const int ne = n + m;
    const double w = 10.0 * (mu + g.lpNorm<Eigen::Infinity>()) + 100.0;

    MatrixXd He = MatrixXd::Zero(ne, ne);
    He.topLeftCorner(n, n) = H;
    He.bottomRightCorner(m, m) = 1e-4 * MatrixXd::Identity(m, m);
    VectorXd ge(ne);
    ge.head(n) = g;
    ge.tail(m).setConstant(w);

    int nbox = 0;
    for (int k = 0; k < n; ++k) {
      if (lo(k) > -1e19) ++nbox;
      if (hi(k) < 1e19) ++nbox;
    }
    // Columns: relaxed general rows, slack positivity, box rows.
    MatrixXd CI = MatrixXd::Zero(ne, 2 * m + nbox);
    VectorXd ci(2 * m + nbox);
    for (int i = 0; i < m; ++i) {
      CI.block(0, i, n, 1) = Jc.row(i).transpose();
      CI(n + i, i) = 1.0;
      ci(i) = c(i);
      CI(n + i, m + i) = 1.0; // s_i >= 0
      ci(m + i) = 0.0;
    }
    int col = 2 * m;
    append_box_rows(z, lo, hi, 0, CI, ci, col);

    const QpResult qr = DenseQp::solve(He, ge, CI, ci);
    if (!qr.feasible) return false;
    p = qr.x.head(n);
    lambda = qr.lambda.head(m);
    return true;
  }

  SolverConfig cfg_;
};

/// Shift-by-one warm start: drop the applied stage, duplicate the last one,
/// clip the progress entries to their bounds.
inline VectorXd warm_start(const SolveResult& previous, const OcpSpec& spec) {
  const int N = spec.horizon;
  VectorXd z = previous.z;
  for (int l = 0; l < N - 1; ++l) {
    z.segment<3>(3 * l) = previous.z.segment<3>(3 * (l + 1));
    z(3 * N + l) = previous.z(3 * N + l + 1);
  }
  z.segment<3>(3 * (N - 1)) = previous.z.segment<3>(3 * (N - 1));
  z(4 * N - 1) = previous.z(4 * N - 1);
  for (int l = 0; l < N; ++l) {
    z(3 * N + l) = std::clamp(z(3 * N + l), 0.0, spec.v_max);
  }
  return z;
}

} // namespace lipmpcc

#endif // LIPMPCC_SOLVER_HPP
