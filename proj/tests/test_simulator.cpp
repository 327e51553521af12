// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "lipmpcc/simulator.hpp"

using namespace lipmpcc;

namespace {

Scenario line_scenario(double length) {
  Scenario s;
  s.name = "line";
  s.path = Path::line(Vec2(0, 0), Vec2(length, 0));
  s.lip = LipParams(0.9, 0.4, 9.81);
  s.weights.mode = ErrorMode::contouring;
  s.weights.contour_running = 300.0;
  s.weights.lag_running = 3.0;
  s.weights.contour_terminal = 300.0;
  s.weights.lag_terminal = 3.0;
  s.progress_weight = 10.0;
  s.max_steps = 80;
  // steady forward gait consistent with ~0.3 m steps
  const double kOmega = s.lip.omega;
  const double sgm = std::cosh(kOmega * s.lip.step_duration);
  const double snh = std::sinh(kOmega * s.lip.step_duration);
  s.initial_state = LipState{0.0, 0.3 * kOmega * snh / (2.0 * (sgm - 1.0)),
                             0.0, 0.0, 0.0};
  return s;
}

} // namespace

TEST_CASE("straight line run completes with small contour error") {
  const Scenario s = line_scenario(5.0);
  const RunReport r = run(s);
  REQUIRE(r.status == RunStatus::completed);
  double max_ec = 0.0;
  for (size_t k = 3; k < r.logs.size(); ++k) {
    max_ec = std::max(max_ec, std::abs(r.logs[k].e_contour));
  }
  CHECK(max_ec <= 0.05);
}

TEST_CASE("theta_init is nondecreasing without disturbances") {
  const Scenario s = line_scenario(5.0);
  const RunReport r = run(s);
  for (size_t k = 1; k < r.logs.size(); ++k) {
    CHECK(r.logs[k].theta_init >= r.logs[k - 1].theta_init - 1e-12);
  }
}

TEST_CASE("zero-length path with robot at goal completes immediately") {
  Scenario s = line_scenario(1e-3);
  s.initial_state = LipState{1e-3, 0.0, 0.0, 0.0, 0.0};
  const RunReport r = run(s);
  CHECK(r.status == RunStatus::completed);
  CHECK(r.logs.size() <= 1);
}

TEST_CASE("parked obstacle on the path never collides") {
  Scenario s = line_scenario(8.0);
  s.weights.mode = ErrorMode::cartesian;
  s.weights.alpha = 200.0;
  s.weights.beta = 200.0;
  s.weights.contour_running = 200.0;
  s.weights.lag_running = 200.0;
  s.weights.contour_terminal = 200.0;
  s.weights.lag_terminal = 200.0;
  s.progress_weight = 50.0;
  s.delta_min = 0.0; // stopping in place must be admissible
  Obstacle obs;
  obs.radius = 0.25;
  obs.position = Vec2(3.0, 0.0);
  s.obstacles.push_back(obs);
  s.max_steps = 60;
  const RunReport r = run(s);
  REQUIRE(r.status != RunStatus::failed);
  REQUIRE(!r.logs.empty());
  double min_b = 1e9;
  for (const StepLog& l : r.logs) {
    for (const ObstacleLog& ol : l.obstacles) min_b = std::min(min_b, ol.b);
  }
  CHECK(min_b > 0.0);

  // CBF forward invariance on the log: b(x_k) >= (1-gamma)^k b(x_0)
  const double b0 = r.logs[0].obstacles[0].b;
  for (size_t k = 0; k < r.logs.size(); ++k) {
    CHECK(r.logs[k].obstacles[0].b >=
          std::pow(1.0 - s.gamma, static_cast<double>(k)) * b0 - 1e-9);
  }
}

TEST_CASE("applied inputs re-check against their bounds offline") {
  Scenario s = line_scenario(5.0);
  const RunReport r = run(s);
  REQUIRE(r.logs.size() >= 2);
  Foot stance = s.initial_stance;
  for (const StepLog& l : r.logs) {
    const Foot placed = other_foot(stance);
    Vec3 lo, hi;
    s.rectangle.stage_bounds(placed, lo, hi);
    const double psi = l.state.theta + l.input.utheta;
    Eigen::Matrix2d rot;
    rot << std::cos(psi), -std::sin(psi), std::sin(psi), std::cos(psi);
    const Vec2 body = rot.transpose() * Vec2(l.input.ux, l.input.uy);
    CHECK(body(0) >= lo(0) - 1e-6);
    CHECK(body(0) <= hi(0) + 1e-6);
    CHECK(body(1) >= lo(1) - 1e-6);
    CHECK(body(1) <= hi(1) + 1e-6);
    CHECK(l.input.utheta >= lo(2) - 1e-6);
    CHECK(l.input.utheta <= hi(2) + 1e-6);
    stance = placed;
  }
  // distance between consecutive footholds within [delta_min, delta_max]
  for (size_t k = 1; k < r.logs.size(); ++k) {
    const StepLog& a = r.logs[k - 1];
    const StepLog& b = r.logs[k];
    const Vec2 fa(a.state.x - a.input.ux, a.state.y - a.input.uy);
    const Vec2 fb(b.state.x - b.input.ux, b.state.y - b.input.uy);
    const double d = (fb - fa).norm();
    CHECK(d >= s.delta_min - 1e-6);
    CHECK(d <= s.delta_max + 1e-6);
  }
}

TEST_CASE("replays are bitwise deterministic for a fixed seed") {
  Scenario s = line_scenario(4.0);
  DisturbanceModel d;
  d.seed = 7;
  d.force_min = -30.0;
  d.force_max = 30.0;
  s.disturbance = d;
  const RunReport a = run(s);
  const RunReport b = run(s);
  REQUIRE(a.logs.size() == b.logs.size());
  CHECK(a.status == b.status);
  for (size_t k = 0; k < a.logs.size(); ++k) {
    CHECK(a.logs[k].state.x == b.logs[k].state.x);
    CHECK(a.logs[k].state.ydot == b.logs[k].state.ydot);
    CHECK(a.logs[k].input.ux == b.logs[k].input.ux);
    CHECK(a.logs[k].v_avg == b.logs[k].v_avg);
    CHECK(a.logs[k].impulse_dvx == b.logs[k].impulse_dvx);
  }
}

TEST_CASE("disturbance schedule is deterministic and within range") {
  DisturbanceModel d;
  d.seed = 3;
  const auto a = detail::impulse_schedule(d, 0.4, 50, 48.0);
  const auto b = detail::impulse_schedule(d, 0.4, 50, 48.0);
  REQUIRE(a.size() == 50);
  const double dv_max = 50.0 * 0.1 / 48.0;
  bool any = false;
  for (size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k] == b[k]);
    // single-pulse bound; coincident pulses in one step may stack
    if (a[k].norm() > 0.0) any = true;
    CHECK(std::abs(a[k].x()) <= 3.0 * dv_max);
  }
  CHECK(any);
}

TEST_CASE("perfect tracking log summarizes to zero contour error") {
  RunReport r;
  r.status = RunStatus::completed;
  StepLog l;
  l.e_contour = 0.0;
  l.e_cart = 0.0;
  l.v_avg = 0.2;
  r.logs.push_back(l);
  const RunSummary s = summarize(r);
  CHECK(s.max_abs_contour == 0.0);
  CHECK(s.steps == 1);
  CHECK(s.status == "completed");
  CHECK_FALSE(s.overtake);
}
