// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_OBSTACLE_HPP
#define LIPMPCC_OBSTACLE_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lipmpcc/lip_model.hpp"

namespace lipmpcc {

/// Circular obstacle moving at constant velocity. `position` is its center
/// at the current step; `inflation` is an extra safety margin on top of the
/// radius (the LIP is a point mass).
struct Obstacle {
  double radius = 0.25;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double inflation = 0.0;

  double effective_radius() const { return radius + inflation; }

  bool valid() const { return radius > 0.0 && inflation >= 0.0; }
};

/// Constant-velocity extrapolation of the obstacle center.
inline Vec2 predict(const Obstacle& obs, int steps_ahead, double step_duration) {
  if (steps_ahead < 0) throw std::invalid_argument("predict: steps_ahead < 0");
  return obs.position + steps_ahead * step_duration * obs.velocity;
}

/// Barrier value b = |xy - center|^2 - r_eff^2; positive outside the disc.
inline double barrier(const Vec2& xy, const Vec2& obstacle_pos, double r_eff) {
  return (xy - obstacle_pos).squaredNorm() - r_eff * r_eff;
}

/// Discrete CBF residual b(x+) - (1-gamma) b(x); feasible when >= 0.
/// The next-state barrier uses the obstacle position predicted one step on.
inline double cbf_residual(const LipState& x, const LipInput& u,
                           const Obstacle& obs, const Vec2& obstacle_pos_now,
                           const Vec2& obstacle_pos_next, double gamma,
                           const LipParams& params) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("cbf_residual: gamma must be in (0,1)");
  }
  const double r = obs.effective_radius();
  const LipState xn = step(x, u, params);
  return barrier(output(xn), obstacle_pos_next, r) -
         (1.0 - gamma) * barrier(output(x), obstacle_pos_now, r);
}

} // namespace lipmpcc

#endif // LIPMPCC_OBSTACLE_HPP
