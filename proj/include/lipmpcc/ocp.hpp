// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_OCP_HPP
#define LIPMPCC_OCP_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lipmpcc/error_frames.hpp"
#include "lipmpcc/lip_model.hpp"
#include "lipmpcc/obstacle.hpp"
#include "lipmpcc/path.hpp"

namespace lipmpcc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Foot { left, right };

inline Foot other_foot(Foot f) { return f == Foot::left ? Foot::right : Foot::left; }

/// Reachability rectangle in the heading-aligned frame. The lateral bounds
/// are stated for a right-foot placement (y_c > 0 since u = COM - foot) and
/// are mirrored for the left foot.
struct RectangleBounds {
  Vec3 lb{-0.25, 0.1, -0.3}; // x_c, y_c, theta offset
  Vec3 ub{0.6, 0.4, 0.3};

  bool valid() const {
    return lb(0) < ub(0) && lb(1) < ub(1) && lb(2) < ub(2);
  }

  void stage_bounds(Foot placed, Vec3& lo, Vec3& hi) const {
    lo = lb;
    hi = ub;
    if (placed == Foot::left) {
      lo(1) = -ub(1);
      hi(1) = -lb(1);
    }
  }
};

/// Declarative description of one finite-horizon MPCC program.
struct OcpSpec {
  int horizon = 5;
  ErrorWeights weights;
  Vec3 input_weight{100.0, 100.0, 5.0}; // diagonal of R
  double progress_weight = 10.0;        // rho
  double v_max = 0.3;
  RectangleBounds rectangle;
  double delta_min = 0.02;
  double delta_max = 0.7;
  double gamma = 0.3;
  std::vector<Obstacle> obstacles;
  LipParams lip;

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("OcpSpec: horizon must be >= 1");
    if (!weights.valid()) throw std::invalid_argument("OcpSpec: weights must be > 0");
    if (!(input_weight.minCoeff() > 0.0))
      throw std::invalid_argument("OcpSpec: input_weight must be > 0");
    if (!(progress_weight >= 0.0))
      throw std::invalid_argument("OcpSpec: progress_weight must be >= 0");
    if (!(v_max > 0.0)) throw std::invalid_argument("OcpSpec: v_max must be > 0");
    if (!rectangle.valid())
      throw std::invalid_argument("OcpSpec: rectangle bounds need lb < ub");
    if (!(delta_min >= 0.0 && delta_min < delta_max))
      throw std::invalid_argument("OcpSpec: need 0 <= delta_min < delta_max");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("OcpSpec: gamma must be in (0,1)");
    for (const Obstacle& o : obstacles) {
      if (!o.valid()) throw std::invalid_argument("OcpSpec: invalid obstacle");
    }
  }
};

enum class ConstraintTag { rectangle, distance, cbf, v_bounds, theta_domain };

/// Condensed single-shooting transcription of the MPCC program.
/// Decision vector z = (u_0..u_{N-1}, v_0..v_{N-1}), size 4N; states and
/// path parameters are reconstructed through the linear step dynamics.
class Nlp {
 public:
  Nlp(const OcpSpec& spec, const LipState& x_init, double theta_init,
      const Path& path, Foot first_placed)
      : spec_(spec), x0_(x_init), theta0_(theta_init), path_(path) {
    spec_.validate();
    if (theta_init < 0.0 || theta_init > path.theta_end()) {
      throw std::invalid_argument("Nlp: theta_init outside the path domain");
    }
    const int N = spec_.horizon;
    step_matrices(spec_.lip, A_, B_);
    C_ = output_matrix();
    // A^l and A^l B for l = 0..N
    Apow_.resize(N + 1);
    AB_.resize(N + 1);
    Apow_[0] = Mat55::Identity();
    AB_[0] = B_;
    for (int l = 1; l <= N; ++l) {
      Apow_[l] = A_ * Apow_[l - 1];
      AB_[l] = A_ * AB_[l - 1];
    }
    parity_.resize(N);
    Foot f = first_placed;
    for (int l = 0; l < N; ++l) {
      parity_[l] = f;
      f = other_foot(f);
    }
    build_tags();
  }

  int horizon() const { return spec_.horizon; }
  int dim() const { return 4 * spec_.horizon; }
  const OcpSpec& spec() const { return spec_; }
  const Path& path() const { return path_; }
  const LipState& initial_state() const { return x0_; }
  double initial_theta() const { return theta0_; }
  Foot placed_foot(int stage) const { return parity_[stage]; }

  int num_constraints() const { return static_cast<int>(tags_.size()); }
  const std::vector<ConstraintTag>& constraint_tags() const { return tags_; }

  VectorXd lower_bound() const {
    VectorXd lo = VectorXd::Constant(dim(), -kInf);
    lo.tail(spec_.horizon).setZero();
    return lo;
  }
  VectorXd upper_bound() const {
    VectorXd hi = VectorXd::Constant(dim(), kInf);
    hi.tail(spec_.horizon).setConstant(spec_.v_max);
    return hi;
  }

  /// States x_0..x_N stacked as columns; exact by construction since the
  /// dynamics are linear.
  MatrixXd rollout(const VectorXd& z) const {
    const int N = spec_.horizon;
    MatrixXd X(5, N + 1);
    X.col(0) = x0_.vec();
    for (int l = 0; l < N; ++l) {
      X.col(l + 1) = A_ * X.col(l) + B_ * z.segment<3>(3 * l);
    }
    return X;
  }

  /// Unclamped path parameters theta_0..theta_N.
  VectorXd thetas(const VectorXd& z) const {
    const int N = spec_.horizon;
    VectorXd th(N + 1);
    th(0) = theta0_;
    for (int l = 0; l < N; ++l) th(l + 1) = th(l) + z(3 * N + l);
    return th;
  }

  double eval_cost(const VectorXd& z, VectorXd* grad = nullptr) const {
    return cost_impl(z, grad, nullptr);
  }

  /// Gauss-Newton curvature of the cost: exact for the quadratic input and
  /// progress terms, first-order in the tracking residuals.
  MatrixXd gauss_newton_hessian(const VectorXd& z) const {
    MatrixXd H = MatrixXd::Zero(dim(), dim());
    cost_impl(z, nullptr, &H);
    return H;
  }

  void eval_constraints(const VectorXd& z, VectorXd& residuals,
                        MatrixXd* jacobian = nullptr) const {
    const int N = spec_.horizon;
    const int m = num_constraints();
    residuals.resize(m);
    if (jacobian) jacobian->setZero(m, dim());
    const MatrixXd X = rollout(z);
    const VectorXd th = thetas(z);
    int row = 0;

    for (int l = 0; l < N; ++l) {
      // Reachability rectangle: lb <= Rot(psi)^T u <= ub in the
      // heading-aligned frame, lateral bounds mirrored by stance parity.
      const Vec3 u = z.segment<3>(3 * l);
      const double psi = X(4, l) + u(2);
      const double c = std::cos(psi), s = std::sin(psi);
      Mat2 RotT;
      RotT << c, s, -s, c;
      Mat2 dRotT;
      dRotT << -s, c, -c, -s;
      const Vec2 m12 = RotT * u.head<2>();
      const Vec2 dm12 = dRotT * u.head<2>();
      Vec3 mval(m12(0), m12(1), u(2));
      Vec3 lo, hi;
      spec_.rectangle.stage_bounds(parity_[l], lo, hi);
      for (int i = 0; i < 3; ++i) residuals(row + i) = mval(i) - lo(i);
      for (int i = 0; i < 3; ++i) residuals(row + 3 + i) = hi(i) - mval(i);
      if (jacobian) {
        Eigen::Matrix<double, 3, Eigen::Dynamic> Jm(3, dim());
        Jm.setZero();
        Jm.block<2, 2>(0, 3 * l) = RotT;
        // psi = theta_0 + sum_{j<=l} utheta_j
        for (int j = 0; j <= l; ++j) Jm.block<2, 1>(0, 3 * j + 2) += dm12;
        Jm(2, 3 * l + 2) = 1.0;
        jacobian->middleRows(row, 3) = Jm;
        jacobian->middleRows(row + 3, 3) = -Jm;
      }
      row += 6;

      // Step distance in squared form. The lower row is dropped when
      // delta_min = 0: it holds identically, but its linearization at a
      // nonzero displacement would block steps through delta = 0.
      const Vec2 delta = C_ * (X.col(l + 1) - X.col(l));
      const double d2 = delta.squaredNorm();
      if (spec_.delta_min > 0.0) {
        residuals(row) = d2 - spec_.delta_min * spec_.delta_min;
      }
      residuals(row + (spec_.delta_min > 0.0 ? 1 : 0)) =
          spec_.delta_max * spec_.delta_max - d2;
      if (jacobian) {
        for (int j = 0; j <= l; ++j) {
          Eigen::Matrix<double, 2, 3> dd =
              C_ * state_sens(l + 1, j) - C_ * state_sens(l, j);
          const Eigen::RowVector3d g = 2.0 * delta.transpose() * dd;
          if (spec_.delta_min > 0.0) {
            jacobian->block<1, 3>(row, 3 * j) = g;
            jacobian->block<1, 3>(row + 1, 3 * j) = -g;
          } else {
            jacobian->block<1, 3>(row, 3 * j) = -g;
          }
        }
      }
      row += spec_.delta_min > 0.0 ? 2 : 1;

      // Discrete CBF per obstacle, with the obstacle position extrapolated
      // to the constraint's own step index.
      for (const Obstacle& obs : spec_.obstacles) {
        const double r = obs.effective_radius();
        const Vec2 p_now = predict(obs, l, spec_.lip.step_duration);
        const Vec2 p_next = predict(obs, l + 1, spec_.lip.step_duration);
        const Vec2 en = C_ * X.col(l + 1) - p_next;
        const Vec2 ec = C_ * X.col(l) - p_now;
        residuals(row) = (en.squaredNorm() - r * r) -
                         (1.0 - spec_.gamma) * (ec.squaredNorm() - r * r);
        if (jacobian) {
          for (int j = 0; j <= l; ++j) {
            Eigen::RowVector3d g =
                2.0 * en.transpose() * (C_ * state_sens(l + 1, j));
            if (j < l) {
              g -= (1.0 - spec_.gamma) * 2.0 * ec.transpose() *
                   (C_ * state_sens(l, j));
            }
            jacobian->block<1, 3>(row, 3 * j) = g;
          }
        }
        row += 1;
      }
    }

    // v bounds, also enforced as hard box bounds in the solver.
    for (int l = 0; l < N; ++l) {
      const double v = z(3 * N + l);
      residuals(row) = v;
      residuals(row + 1) = spec_.v_max - v;
      if (jacobian) {
        (*jacobian)(row, 3 * N + l) = 1.0;
        (*jacobian)(row + 1, 3 * N + l) = -1.0;
      }
      row += 2;
    }

    // Path domain for theta_1..theta_N.
    for (int l = 1; l <= N; ++l) {
      residuals(row) = th(l);
      residuals(row + 1) = path_.theta_end() - th(l);
      if (jacobian) {
        for (int j = 0; j < l; ++j) {
          (*jacobian)(row, 3 * N + j) = 1.0;
          (*jacobian)(row + 1, 3 * N + j) = -1.0;
        }
      }
      row += 2;
    }
  }

 private:
  static constexpr double kInf = 1e20;

  // d x_l / d u_j = A^(l-1-j) B for j < l, zero otherwise.
  const Mat53& state_sens_nonzero(int l, int j) const { return AB_[l - 1 - j]; }
  Mat53 state_sens(int l, int j) const {
    if (j >= l) return Mat53::Zero();
    return AB_[l - 1 - j];
  }

  void build_tags() {
    const int N = spec_.horizon;
    tags_.clear();
    for (int l = 0; l < N; ++l) {
      for (int i = 0; i < 6; ++i) tags_.push_back(ConstraintTag::rectangle);
      if (spec_.delta_min > 0.0) tags_.push_back(ConstraintTag::distance);
      tags_.push_back(ConstraintTag::distance);
      for (size_t o = 0; o < spec_.obstacles.size(); ++o) {
        tags_.push_back(ConstraintTag::cbf);
      }
    }
    for (int l = 0; l < N; ++l) {
      tags_.push_back(ConstraintTag::v_bounds);
      tags_.push_back(ConstraintTag::v_bounds);
    }
    for (int l = 1; l <= N; ++l) {
      tags_.push_back(ConstraintTag::theta_domain);
      tags_.push_back(ConstraintTag::theta_domain);
    }
  }

  double cost_impl(const VectorXd& z, VectorXd* grad, MatrixXd* gn) const {
    const int N = spec_.horizon;
    const bool contour = spec_.weights.mode == ErrorMode::contouring;
    if (grad) grad->setZero(dim());
    const MatrixXd X = rollout(z);
    const VectorXd th = thetas(z);

    double cost = 0.0;
    double phi_prev = 0.0;
    for (int l = 0; l <= N; ++l) {
      const double th_raw = th(l);
      const double th_cl = std::clamp(th_raw, 0.0, path_.theta_end());
      const bool interior = th_raw >= 0.0 && th_raw <= path_.theta_end();
      const PathEval pe = path_.eval(th_cl);
      const Vec2 e_cart = C_ * X.col(l) - pe.point;

      Mat2 M = Mat2::Identity();
      Vec2 dr_dth = -pe.d1;
      if (contour) {
        double phi = path_.slope(th_cl);
        if (l > 0) phi = unwrap_near(phi, phi_prev);
        phi_prev = phi;
        M = frame_matrix(phi);
        dr_dth = frame_matrix_derivative(phi) * path_.slope_derivative(th_cl) *
                     e_cart -
                 M * pe.d1;
      }
      const Vec2 r = M * e_cart;
      const Mat2 S = (l < N) ? spec_.weights.running_bar()
                             : spec_.weights.terminal_bar();
      cost += r.dot(S * r);

      if (grad || gn) {
        const Vec2 Sr2 = 2.0 * (S * r);
        // residual Jacobian rows for the Gauss-Newton term
        for (int j = 0; j < l; ++j) {
          const Eigen::Matrix<double, 2, 3> dru = M * (C_ * state_sens_nonzero(l, j));
          if (grad) grad->segment<3>(3 * j) += dru.transpose() * Sr2;
          if (gn) {
            for (int j2 = 0; j2 < l; ++j2) {
              const Eigen::Matrix<double, 2, 3> dru2 =
                  M * (C_ * state_sens_nonzero(l, j2));
              gn->block<3, 3>(3 * j, 3 * j2) +=
                  2.0 * dru.transpose() * S * dru2;
            }
            if (interior) {
              const Eigen::Matrix<double, 3, 1> cross =
                  2.0 * dru.transpose() * S * dr_dth;
              for (int j2 = 0; j2 < l; ++j2) {
                gn->block<3, 1>(3 * j, 3 * N + j2) += cross;
                gn->block<1, 3>(3 * N + j2, 3 * j) += cross.transpose();
              }
            }
          }
        }
        if (interior) {
          const double gth = Sr2.dot(dr_dth);
          if (grad) {
            for (int j = 0; j < l; ++j) (*grad)(3 * N + j) += gth;
          }
          if (gn) {
            const double hvv = 2.0 * dr_dth.dot(S * dr_dth);
            for (int j = 0; j < l; ++j) {
              for (int j2 = 0; j2 < l; ++j2) (*gn)(3 * N + j, 3 * N + j2) += hvv;
            }
          }
        }
      }
    }

    // Input effort and progress reward.
    for (int l = 0; l < N; ++l) {
      const Vec3 u = z.segment<3>(3 * l);
      cost += u.dot(spec_.input_weight.asDiagonal() * u);
      const double v = z(3 * N + l);
      cost -= spec_.progress_weight * v * v;
      if (grad) {
        grad->segment<3>(3 * l) += 2.0 * spec_.input_weight.asDiagonal() * u;
        (*grad)(3 * N + l) -= 2.0 * spec_.progress_weight * v;
      }
      if (gn) {
        const Eigen::Matrix3d Ru = (2.0 * spec_.input_weight).asDiagonal();
        gn->block<3, 3>(3 * l, 3 * l) += Ru;
        (*gn)(3 * N + l, 3 * N + l) -= 2.0 * spec_.progress_weight;
      }
    }
    return cost;
  }

  OcpSpec spec_;
  LipState x0_;
  double theta0_;
  Path path_;
  Mat55 A_;
  Mat53 B_;
  Mat25 C_;
  std::vector<Mat55> Apow_;
  std::vector<Mat53> AB_; // A^l B
  std::vector<Foot> parity_;
  std::vector<ConstraintTag> tags_;
};

} // namespace lipmpcc

#endif // LIPMPCC_OCP_HPP
