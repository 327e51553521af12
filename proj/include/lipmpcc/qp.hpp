// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_QP_HPP
#define LIPMPCC_QP_HPP

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace lipmpcc {

/// Dense strictly convex QP
///   minimize 1/2 x' G x + a' x   subject to  CI' x + ci >= 0
/// solved with the Goldfarb-Idnani dual active-set method. Starts at the
/// unconstrained minimum and adds violated constraints one at a time, so no
/// feasible initial point is required; primal infeasibility shows up as an
/// unbounded dual step.
struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda; // one multiplier per constraint, >= 0
  bool feasible = false;
  int iterations = 0;
};

class DenseQp {
 public:
  static QpResult solve(const Eigen::MatrixXd& G, const Eigen::VectorXd& a,
                        const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci,
                        double tol = 1e-10) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const int n = static_cast<int>(G.rows());
    const int m = static_cast<int>(CI.cols());
    const double inf = std::numeric_limits<double>::infinity();

    QpResult out;
    out.lambda = VectorXd::Zero(m);

    Eigen::LLT<MatrixXd> chol(G);
    if (chol.info() != Eigen::Success) return out;
    MatrixXd J = chol.matrixU().solve(MatrixXd::Identity(n, n)); // L^{-T}
    VectorXd x = -chol.solve(a);

    MatrixXd R = MatrixXd::Zero(n, n);
    std::vector<int> active;
    VectorXd u = VectorXd::Zero(n); // multipliers of active constraints
    int q = 0;

    const double scale = 1.0 + (m > 0 ? ci.cwiseAbs().maxCoeff() : 0.0);
    const double feas_tol = tol * scale * 100.0;
    const int max_iter = 20 * (m + n) + 100;

    int iter = 0;
    while (iter++ < max_iter) {
      // Most violated constraint.
      int p = -1;
      double worst = -feas_tol;
      for (int i = 0; i < m; ++i) {
        bool is_active = false;
        for (int k = 0; k < q; ++k) {
          if (active[k] == i) {
            is_active = true;
            break;
          }
        }
        if (is_active) continue;
        const double s = CI.col(i).dot(x) + ci(i);
        if (s < worst) {
          worst = s;
          p = i;
        }
      }
      if (p < 0) {
        out.x = x;
        for (int k = 0; k < q; ++k) out.lambda(active[k]) = u(k);
        out.feasible = true;
        out.iterations = iter;
        return out;
      }

      const VectorXd np = CI.col(p);
      double u_p = 0.0;
      double s_p = np.dot(x) + ci(p);

      // Step computation loop for constraint p.
      while (iter++ < max_iter) {
        const VectorXd d = J.transpose() * np;
        VectorXd z = VectorXd::Zero(n);
        for (int k = q; k < n; ++k) z += J.col(k) * d(k);
        VectorXd r = VectorXd::Zero(q);
        if (q > 0) {
          r = R.topLeftCorner(q, q)
                  .triangularView<Eigen::Upper>()
                  .solve(d.head(q));
        }

        double t1 = inf;
        int blocking = -1;
        for (int k = 0; k < q; ++k) {
          if (r(k) > tol) {
            const double ratio = u(k) / r(k);
            if (ratio < t1) {
              t1 = ratio;
              blocking = k;
            }
          }
        }
        const double ztnp = z.dot(np);
        const double t2 = (ztnp > tol) ? -s_p / ztnp : inf;
        const double t = std::min(t1, t2);

        if (!std::isfinite(t)) {
          // No primal or dual step possible: QP infeasible.
          out.x = x;
          out.iterations = iter;
          return out;
        }

        if (!std::isfinite(t2)) {
          // Pure dual step: drop the blocking constraint and retry.
          for (int k = 0; k < q; ++k) u(k) -= t * r(k);
          u_p += t;
          drop_constraint(R, J, active, u, q, blocking);
          continue;
        }

        x += t * z;
        s_p = np.dot(x) + ci(p);
        for (int k = 0; k < q; ++k) u(k) -= t * r(k);
        u_p += t;

        if (t == t2) {
          add_constraint(R, J, d, q);
          active.push_back(p);
          u(q - 1) = u_p;
          break;
        }
        drop_constraint(R, J, active, u, q, blocking);
      }
    }
    // Iteration limit: report whatever we have, flagged infeasible.
    out.x = x;
    out.iterations = iter;
    return out;
  }

 private:
  // Zero the tail of d = J' np with Givens rotations and append it as the
  // new last column of R.
  static void add_constraint(Eigen::MatrixXd& R, Eigen::MatrixXd& J,
                             Eigen::VectorXd d, int& q) {
    const int n = static_cast<int>(J.rows());
    for (int j = n - 1; j >= q + 1; --j) {
      const double aa = d(j - 1), bb = d(j);
      const double h = std::hypot(aa, bb);
      if (h == 0.0) continue;
      const double c = aa / h, s = bb / h;
      d(j - 1) = h;
      d(j) = 0.0;
      const Eigen::VectorXd cj1 = J.col(j - 1), cj = J.col(j);
      J.col(j - 1) = c * cj1 + s * cj;
      J.col(j) = -s * cj1 + c * cj;
    }
    R.col(q).head(q + 1) = d.head(q + 1);
    ++q;
  }

  static void drop_constraint(Eigen::MatrixXd& R, Eigen::MatrixXd& J,
                              std::vector<int>& active, Eigen::VectorXd& u,
                              int& q, int l) {
    for (int i = l; i < q - 1; ++i) {
      active[i] = active[i + 1];
      u(i) = u(i + 1);
      R.col(i) = R.col(i + 1);
    }
    active.pop_back();
    u(q - 1) = 0.0;
    --q;
    // Restore triangularity of the shifted columns.
    for (int j = l; j < q; ++j) {
      const double aa = R(j, j), bb = R(j + 1, j);
      const double h = std::hypot(aa, bb);
      if (h == 0.0) continue;
      const double c = aa / h, s = bb / h;
      for (int col = j; col < q; ++col) {
        const double t1 = R(j, col), t2 = R(j + 1, col);
        R(j, col) = c * t1 + s * t2;
        R(j + 1, col) = -s * t1 + c * t2;
      }
      const Eigen::VectorXd cj = J.col(j), cj1 = J.col(j + 1);
      J.col(j) = c * cj + s * cj1;
      J.col(j + 1) = -s * cj + c * cj1;
    }
  }
};

} // namespace lipmpcc

#endif // LIPMPCC_QP_HPP
