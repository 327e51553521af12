// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_ERROR_FRAMES_HPP
#define LIPMPCC_ERROR_FRAMES_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "lipmpcc/path.hpp"

namespace lipmpcc {

using Mat2 = Eigen::Matrix2d;

enum class ErrorMode { cartesian, contouring };

/// Weights for the tracking error terms. Cartesian mode uses alpha I / beta I;
/// contouring mode uses diag{contour, lag} in the path-aligned frame.
struct ErrorWeights {
  ErrorMode mode = ErrorMode::contouring;
  // cartesian
  double alpha = 1.0; // running
  double beta = 1.0;  // terminal
  // contouring
  double contour_running = 1.0;  // alpha_1
  double lag_running = 1.0;      // alpha_2
  double contour_terminal = 1.0; // beta_1
  double lag_terminal = 1.0;     // beta_2

  bool valid() const {
    if (mode == ErrorMode::cartesian) return alpha > 0.0 && beta > 0.0;
    return contour_running > 0.0 && lag_running > 0.0 &&
           contour_terminal > 0.0 && lag_terminal > 0.0;
  }

  Mat2 running_bar() const {
    Mat2 m = Mat2::Zero();
    if (mode == ErrorMode::cartesian) {
      m.diagonal() << alpha, alpha;
    } else {
      m.diagonal() << contour_running, lag_running;
    }
    return m;
  }
  Mat2 terminal_bar() const {
    Mat2 m = Mat2::Zero();
    if (mode == ErrorMode::cartesian) {
      m.diagonal() << beta, beta;
    } else {
      m.diagonal() << contour_terminal, lag_terminal;
    }
    return m;
  }
};

/// Rotation-reflection P(phi) mapping Cartesian error to (contour, lag)
/// components. P is symmetric, involutory and orthogonal.
inline Mat2 frame_matrix(double phi) {
  const double s = std::sin(phi), c = std::cos(phi);
  Mat2 P;
  P << s, -c, -c, -s;
  return P;
}

/// d P / d phi.
inline Mat2 frame_matrix_derivative(double phi) {
  const double s = std::sin(phi), c = std::cos(phi);
  Mat2 dP;
  dP << c, s, s, -c;
  return dP;
}

/// Approximate contouring/lag error at path parameter theta:
/// e_bar = P(slope(theta)) (robot_xy - y^d(theta)).
inline Vec2 contour_lag_error(const Vec2& robot_xy, const Path& path,
                              double theta) {
  const PathEval e = path.eval(theta);
  return frame_matrix(path.slope(theta)) * (robot_xy - e.point);
}

/// Cartesian-frame weight matrices Q, W for the configured mode.
/// In contouring mode Q = P' Qbar P rotates with the path slope.
inline void weight_matrices(const ErrorWeights& w, double phi, Mat2& Q,
                            Mat2& W) {
  if (!w.valid()) throw std::invalid_argument("ErrorWeights: weights must be > 0");
  if (w.mode == ErrorMode::cartesian) {
    Q = w.alpha * Mat2::Identity();
    W = w.beta * Mat2::Identity();
    return;
  }
  const Mat2 P = frame_matrix(phi);
  Q = P.transpose() * w.running_bar() * P;
  W = P.transpose() * w.terminal_bar() * P;
}

} // namespace lipmpcc

#endif // LIPMPCC_ERROR_FRAMES_HPP
