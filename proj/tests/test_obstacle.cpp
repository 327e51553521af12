// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "lipmpcc/obstacle.hpp"

using namespace lipmpcc;

TEST_CASE("constant-velocity prediction") {
  Obstacle obs;
  obs.position = Vec2(1.0, -2.0);
  obs.velocity = Vec2(0.1, 0.0);
  CHECK((predict(obs, 3, 0.4) - Vec2(1.12, -2.0)).norm() < 1e-15);
  obs.velocity = Vec2::Zero();
  for (int k : {0, 1, 7}) CHECK(predict(obs, k, 0.4) == obs.position);
  obs.velocity = Vec2(0.6, 0.0);
  CHECK((predict(obs, 5, 0.4) - (obs.position + Vec2(1.2, 0.0))).norm() < 1e-12);
  CHECK_THROWS_AS(predict(obs, -1, 0.4), std::invalid_argument);
}

TEST_CASE("barrier values") {
  CHECK(barrier(Vec2(1, 0), Vec2(0, 0), 0.25) == Catch::Approx(0.9375));
  CHECK(barrier(Vec2(0.25, 0), Vec2(0, 0), 0.25) == Catch::Approx(0.0).margin(1e-15));
  CHECK(barrier(Vec2(0.1, 0), Vec2(0, 0), 0.25) < 0.0);
}

TEST_CASE("inflation widens the effective radius") {
  Obstacle obs;
  obs.radius = 0.25;
  obs.inflation = 0.1;
  CHECK(obs.effective_radius() == Catch::Approx(0.35));
}

TEST_CASE("cbf residual for benign and boundary cases") {
  const LipParams prm(0.9, 0.4, 9.81);
  Obstacle obs;
  obs.radius = 0.25;
  obs.position = Vec2(100.0, 0.0);
  // far away: both barriers large, residual positive
  CHECK(cbf_residual(LipState{}, LipInput{}, obs, obs.position, obs.position,
                     0.3, prm) > 0.0);
  // stationary robot exactly on the boundary of a stationary obstacle
  Obstacle near;
  near.radius = 0.25;
  near.position = Vec2(0.25, 0.0);
  const double r = cbf_residual(LipState{}, LipInput{}, near, near.position,
                                near.position, 0.3, prm);
  CHECK(r == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("cbf residual equals its compositional definition") {
  const LipParams prm(0.9, 0.4, 9.81);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Obstacle obs;
    obs.radius = 0.2 + 0.3 * std::abs(d(rng));
    obs.position = Vec2(2.0 * d(rng), 2.0 * d(rng));
    obs.velocity = Vec2(0.5 * d(rng), 0.5 * d(rng));
    const LipState x{d(rng), d(rng), d(rng), d(rng), d(rng)};
    const LipInput u{0.4 * d(rng), 0.4 * d(rng), 0.2 * d(rng)};
    const double gamma = 0.3;
    const Vec2 p_now = predict(obs, 2, prm.step_duration);
    const Vec2 p_next = predict(obs, 3, prm.step_duration);
    const double got =
        cbf_residual(x, u, obs, p_now, p_next, gamma, prm);
    const double ref =
        barrier(output(step(x, u, prm)), p_next, obs.effective_radius()) -
        (1.0 - gamma) * barrier(output(x), p_now, obs.effective_radius());
    CHECK(got == Catch::Approx(ref).margin(1e-12));
  }
}

TEST_CASE("gamma outside (0,1) is rejected") {
  const LipParams prm(0.9, 0.4, 9.81);
  Obstacle obs;
  CHECK_THROWS_AS(cbf_residual(LipState{}, LipInput{}, obs, Vec2(1, 1),
                               Vec2(1, 1), 0.0, prm),
                  std::invalid_argument);
  CHECK_THROWS_AS(cbf_residual(LipState{}, LipInput{}, obs, Vec2(1, 1),
                               Vec2(1, 1), 1.0, prm),
                  std::invalid_argument);
}
