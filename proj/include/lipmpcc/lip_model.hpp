// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_LIP_MODEL_HPP
#define LIPMPCC_LIP_MODEL_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace lipmpcc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat55 = Eigen::Matrix<double, 5, 5>;
using Mat53 = Eigen::Matrix<double, 5, 3>;
using Mat25 = Eigen::Matrix<double, 2, 5>;

/// Parameters of the 3D linear inverted pendulum with fixed step timing.
struct LipParams {
  double com_height = 0.9;    // H [m]
  double step_duration = 0.4; // T [s]
  double gravity = 9.81;      // g [m/s^2]
  double omega = 0.0;         // sqrt(g/H) [1/s], cached

  LipParams() { omega = std::sqrt(gravity / com_height); }
  LipParams(double H, double T, double g)
      : com_height(H), step_duration(T), gravity(g) {
    if (!(H > 0.0) || !(T > 0.0) || !(g > 0.0)) {
      throw std::invalid_argument("LipParams: H, T, g must be positive");
    }
    omega = std::sqrt(g / H);
  }
};

/// COM state at the beginning of a step plus the heading of the
/// reachability rectangle. theta is not wrapped.
struct LipState {
  double x = 0.0;
  double xdot = 0.0;
  double y = 0.0;
  double ydot = 0.0;
  double theta = 0.0;

  Vec5 vec() const {
    Vec5 v;
    v << x, xdot, y, ydot, theta;
    return v;
  }
  static LipState from_vec(const Vec5& v) {
    return LipState{v(0), v(1), v(2), v(3), v(4)};
  }
};

/// Footstep command: planar offset from the new stance foot to the COM at
/// the start of the step, plus the heading increment.
struct LipInput {
  double ux = 0.0;
  double uy = 0.0;
  double utheta = 0.0;

  Vec3 vec() const { return Vec3(ux, uy, utheta); }
  static LipInput from_vec(const Vec3& v) { return LipInput{v(0), v(1), v(2)}; }
};

/// Closed-form step-to-step matrices. With sigma = cosh(omega T) and
/// s = sinh(omega T), each COM axis evolves as
///   x+ = x + (s/omega) xdot + (sigma - 1) ux
///   xdot+ = sigma xdot + omega s ux
/// and theta integrates utheta.
inline void step_matrices(const LipParams& p, Mat55& A, Mat53& B) {
  const double wT = p.omega * p.step_duration;
  const double sigma = std::cosh(wT);
  const double s = std::sinh(wT);
  A.setZero();
  B.setZero();
  for (int axis = 0; axis < 2; ++axis) {
    const int i = 2 * axis;
    A(i, i) = 1.0;
    A(i, i + 1) = s / p.omega;
    A(i + 1, i + 1) = sigma;
    B(i, axis) = sigma - 1.0;
    B(i + 1, axis) = p.omega * s;
  }
  A(4, 4) = 1.0;
  B(4, 2) = 1.0;
}

inline LipState step(const LipState& state, const LipInput& input,
                     const LipParams& params) {
  Mat55 A;
  Mat53 B;
  step_matrices(params, A, B);
  return LipState::from_vec(A * state.vec() + B * input.vec());
}

/// Output map C x = (x, y).
inline Vec2 output(const LipState& state) { return Vec2(state.x, state.y); }

inline Mat25 output_matrix() {
  Mat25 C = Mat25::Zero();
  C(0, 0) = 1.0;
  C(1, 2) = 1.0;
  return C;
}

/// Velocity impulse at a step boundary. Positions and heading unchanged.
inline LipState apply_impulse(const LipState& state, double dvx, double dvy) {
  LipState out = state;
  out.xdot += dvx;
  out.ydot += dvy;
  return out;
}

/// Force pulse to velocity impulse: dv = F dt / m.
inline double impulse_from_force(double force_newton, double duration_s,
                                 double mass_kg) {
  return force_newton * duration_s / mass_kg;
}

} // namespace lipmpcc

#endif // LIPMPCC_LIP_MODEL_HPP
