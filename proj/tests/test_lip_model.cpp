// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "lipmpcc/lip_model.hpp"
#include "test_oracles.hpp"

using namespace lipmpcc;

TEST_CASE("step matrices closed form") {
  const LipParams prm(1.0, 0.4, 9.81);
  Mat55 A;
  Mat53 B;
  step_matrices(prm, A, B);
  const double wT = prm.omega * prm.step_duration;
  CHECK(A(1, 1) == Catch::Approx(std::cosh(wT)).epsilon(1e-14));
  CHECK(B(1, 0) == Catch::Approx(prm.omega * std::sinh(wT)).epsilon(1e-14));
  CHECK(A(0, 1) == Catch::Approx(std::sinh(wT) / prm.omega).epsilon(1e-14));
  CHECK(B(0, 0) == Catch::Approx(std::cosh(wT) - 1.0).epsilon(1e-14));
  // y block mirrors the x block
  CHECK(A(2, 3) == A(0, 1));
  CHECK(B(3, 1) == B(1, 0));
}

TEST_CASE("zero-duration limit is identity on the COM") {
  const LipParams prm(1.0, 1e-9, 9.81);
  Mat55 A;
  Mat53 B;
  step_matrices(prm, A, B);
  CHECK((A - Mat55::Identity()).norm() < 1e-7);
  Mat53 Bref = Mat53::Zero();
  Bref(4, 2) = 1.0;
  CHECK((B - Bref).norm() < 1e-7);
}

TEST_CASE("heading is a pure integrator") {
  const LipParams prm(0.9, 0.4, 9.81);
  LipState s;
  s.theta = 0.3;
  LipInput u;
  u.utheta = 0.2;
  CHECK(step(s, u, prm).theta == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("equilibrium over the stance foot") {
  const LipParams prm(0.9, 0.4, 9.81);
  const LipState out = step(LipState{}, LipInput{}, prm);
  CHECK(out.vec().norm() == 0.0);
}

TEST_CASE("unforced step matches the closed form") {
  const LipParams prm(1.0, 0.4, 9.81);
  LipState s;
  s.xdot = 0.5;
  const LipState out = step(s, LipInput{}, prm);
  const double wT = prm.omega * prm.step_duration;
  CHECK(out.x == Catch::Approx(std::sinh(wT) / prm.omega * 0.5).epsilon(1e-12));
  CHECK(out.xdot == Catch::Approx(std::cosh(wT) * 0.5).epsilon(1e-12));
  const LipState ref = test::rk4_step(s, LipInput{}, prm);
  CHECK(std::abs(out.x - ref.x) < 1e-9);
  CHECK(std::abs(out.xdot - ref.xdot) < 1e-9);
}

TEST_CASE("step agrees with the RK4 oracle on random draws") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const LipParams prm(0.7 + 0.5 * std::abs(d(rng)),
                        0.25 + 0.3 * std::abs(d(rng)), 9.81);
    const LipState s{d(rng), d(rng), d(rng), d(rng), d(rng)};
    const LipInput u{0.5 * d(rng), 0.5 * d(rng), 0.3 * d(rng)};
    const LipState got = step(s, u, prm);
    const LipState ref = test::rk4_step(s, u, prm);
    CHECK((got.vec() - ref.vec()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("COM block is linear in state and input") {
  const LipParams prm(0.9, 0.4, 9.81);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec5 s1 = Vec5::NullaryExpr([&]() { return d(rng); });
    const Vec5 s2 = Vec5::NullaryExpr([&]() { return d(rng); });
    const Vec3 u1 = Vec3::NullaryExpr([&]() { return d(rng); });
    const Vec3 u2 = Vec3::NullaryExpr([&]() { return d(rng); });
    const double a = d(rng), b = d(rng);
    const Vec5 lhs = step(LipState::from_vec(a * s1 + b * s2),
                          LipInput::from_vec(a * u1 + b * u2), prm)
                         .vec();
    const Vec5 rhs =
        a * step(LipState::from_vec(s1), LipInput::from_vec(u1), prm).vec() +
        b * step(LipState::from_vec(s2), LipInput::from_vec(u2), prm).vec();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("heading and COM blocks are decoupled") {
  const LipParams prm(0.9, 0.4, 9.81);
  const LipState s{0.1, -0.2, 0.3, 0.4, 0.5};
  const LipState a = step(s, LipInput{0.1, -0.05, 0.0}, prm);
  const LipState b = step(s, LipInput{0.1, -0.05, 0.7}, prm);
  CHECK(a.x == b.x);
  CHECK(a.xdot == b.xdot);
  CHECK(a.y == b.y);
  CHECK(a.ydot == b.ydot);
  const LipState c = step(s, LipInput{0.0, 0.0, 0.7}, prm);
  CHECK(c.theta == b.theta);
}

TEST_CASE("A is invertible; inverse step round-trips") {
  const LipParams prm(0.9, 0.4, 9.81);
  Mat55 A;
  Mat53 B;
  step_matrices(prm, A, B);
  const LipState s{0.3, -0.1, 0.2, 0.6, 0.4};
  const LipInput u{0.1, -0.2, 0.05};
  const Vec5 forward = step(s, u, prm).vec();
  const Vec5 back = A.inverse() * (forward - B * u.vec());
  CHECK((back - s.vec()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("output selects the planar position") {
  CHECK(output(LipState{1, 2, 3, 4, 5}) == Vec2(1, 3));
  CHECK(output(LipState{}) == Vec2(0, 0));
  CHECK(output_matrix() * LipState{1, 2, 3, 4, 5}.vec() == Vec2(1, 3));
}

TEST_CASE("velocity impulses touch only the velocities") {
  const LipState out = apply_impulse(LipState{}, 0.1, 0.0);
  CHECK(out.xdot == Catch::Approx(0.1));
  CHECK(out.x == 0.0);
  CHECK(out.y == 0.0);
  CHECK(out.theta == 0.0);
  const LipState s{1, 2, 3, 4, 5};
  const LipState id = apply_impulse(s, 0.0, 0.0);
  CHECK((id.vec() - s.vec()).norm() == 0.0);
}

TEST_CASE("force pulse to velocity impulse") {
  CHECK(impulse_from_force(50.0, 0.1, 48.0) ==
        Catch::Approx(50.0 * 0.1 / 48.0).epsilon(1e-15));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(LipParams(-1.0, 0.4, 9.81), std::invalid_argument);
  CHECK_THROWS_AS(LipParams(0.9, 0.0, 9.81), std::invalid_argument);
  CHECK_THROWS_AS(LipParams(0.9, 0.4, -9.81), std::invalid_argument);
}
