// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_SIMULATOR_HPP
#define LIPMPCC_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lipmpcc/ocp.hpp"
#include "lipmpcc/solver.hpp"

namespace lipmpcc {

/// Random force pulses on the torso, realized as velocity impulses at the
/// boundary of the step containing the sampled instant.
struct DisturbanceModel {
  double force_min = -50.0; // N, per axis
  double force_max = 50.0;
  double pulse_duration = 0.1; // s
  double max_gap = 2.0;        // s between pulses
  uint64_t seed = 0;

  bool valid() const {
    return pulse_duration > 0.0 && max_gap > 0.0 && force_min <= force_max;
  }
};

struct Scenario {
  std::string name;
  Path path = Path::line(Vec2(0, 0), Vec2(1, 0));
  LipParams lip;
  double robot_mass = 48.0;
  ErrorWeights weights;
  Vec3 input_weight{100.0, 100.0, 5.0};
  double progress_weight = 10.0;
  int horizon = 5;
  double v_max = 0.3;
  RectangleBounds rectangle;
  double delta_min = 0.02;
  double delta_max = 0.7;
  double gamma = 0.3;
  std::vector<Obstacle> obstacles;
  std::optional<DisturbanceModel> disturbance;
  LipState initial_state;
  Foot initial_stance = Foot::left; // current support foot
  int max_steps = 200;
  uint64_t seed = 0;
  std::string output_dir;
  double goal_eps_frac = 0.01; // eps_goal = frac * theta_end
  double goal_eps_xy = 0.1;    // m
  SolverConfig solver;

  OcpSpec ocp_spec() const {
    OcpSpec s;
    s.horizon = horizon;
    s.weights = weights;
    s.input_weight = input_weight;
    s.progress_weight = progress_weight;
    s.v_max = v_max;
    s.rectangle = rectangle;
    s.delta_min = delta_min;
    s.delta_max = delta_max;
    s.gamma = gamma;
    s.obstacles = obstacles;
    s.lip = lip;
    return s;
  }
};

struct ObstacleLog {
  double b = 0.0;         // barrier value at the logged state
  double clearance = 0.0; // |COM - center|
};

struct StepLog {
  int k = 0;
  double time = 0.0;
  LipState state; // at the start of the step, after any impulse
  LipInput input; // applied footstep command
  double theta_init = 0.0;
  double v_applied = 0.0;
  double v_avg = 0.0;
  double e_contour = 0.0;
  double e_lag = 0.0;
  double e_cart = 0.0;
  std::vector<ObstacleLog> obstacles;
  std::string solver_status;
  int solver_iterations = 0;
  double solver_kkt = 0.0;
  double solver_time = 0.0;
  double impulse_dvx = 0.0;
  double impulse_dvy = 0.0;
};

enum class RunStatus { completed, max_steps, failed };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::max_steps: return "max_steps";
    case RunStatus::failed: return "failed";
  }
  return "unknown";
}

struct RunSummary {
  std::string status;
  int steps = 0;
  double max_abs_contour = 0.0;
  double mean_abs_contour = 0.0;
  double max_cart = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  bool overtake = false;
  double mean_v_avg = 0.0;
  double mean_solve_time = 0.0;
};

struct RunReport {
  RunStatus status = RunStatus::max_steps;
  std::vector<StepLog> logs;
  // Projected path parameter of the first obstacle per logged step,
  // alongside the robot's theta_init; used for the overtake flag.
  std::vector<double> obstacle_theta;
  double path_theta_end = 0.0;
  RunSummary summary;
};

namespace detail {

// Per-step velocity impulses from the disturbance schedule.
inline std::vector<Vec2> impulse_schedule(const DisturbanceModel& d,
                                          double step_duration, int max_steps,
                                          double mass) {
  std::vector<Vec2> impulses(max_steps, Vec2::Zero());
  std::mt19937_64 rng(d.seed);
  std::uniform_real_distribution<double> gap_dist(0.0, d.max_gap);
  std::uniform_real_distribution<double> force_dist(d.force_min, d.force_max);
  const double t_end = max_steps * step_duration;
  double t = gap_dist(rng);
  while (t < t_end) {
    const double fx = force_dist(rng);
    const double fy = force_dist(rng);
    const int k = static_cast<int>(t / step_duration);
    impulses[k].x() += impulse_from_force(fx, d.pulse_duration, mass);
    impulses[k].y() += impulse_from_force(fy, d.pulse_duration, mass);
    t += std::max(gap_dist(rng), 1e-3);
  }
  return impulses;
}

// Alternating-parity footstep guess at the current heading; keeps the first
// QP away from the degenerate zero-displacement point.
inline VectorXd nominal_guess(const OcpSpec& spec, const LipState& x,
                              Foot first_placed) {
  const int N = spec.horizon;
  VectorXd z = VectorXd::Zero(4 * N);
  Foot f = first_placed;
  const double yc = 0.5 * (spec.rectangle.lb(1) + spec.rectangle.ub(1));
  const double c = std::cos(x.theta), s = std::sin(x.theta);
  for (int l = 0; l < N; ++l) {
    const double sign = (f == Foot::right) ? 1.0 : -1.0;
    z(3 * l) = -s * sign * yc;
    z(3 * l + 1) = c * sign * yc;
    f = other_foot(f);
  }
  return z;
}

} // namespace detail

inline RunSummary summarize(const RunReport& report) {
  RunSummary s;
  s.status = to_string(report.status);
  s.steps = static_cast<int>(report.logs.size());
  if (report.logs.empty()) return s;
  double sum_contour = 0.0, sum_v = 0.0, sum_time = 0.0;
  for (const StepLog& log : report.logs) {
    s.max_abs_contour = std::max(s.max_abs_contour, std::abs(log.e_contour));
    sum_contour += std::abs(log.e_contour);
    s.max_cart = std::max(s.max_cart, log.e_cart);
    for (const ObstacleLog& ol : log.obstacles) {
      s.min_clearance = std::min(s.min_clearance, ol.clearance);
    }
    sum_v += log.v_avg;
    sum_time += log.solver_time;
  }
  s.mean_abs_contour = sum_contour / s.steps;
  s.mean_v_avg = sum_v / s.steps;
  s.mean_solve_time = sum_time / s.steps;

  // Overtake: the robot's projected parameter passes the obstacle's and
  // stays ahead until the end of the run. Steps where the obstacle's
  // projection is pinned at the far end of the path (the obstacle has left
  // the domain) carry no ordering information and are skipped.
  if (!report.obstacle_theta.empty()) {
    int first_ahead = -1;
    int considered = 0, last_considered = -1;
    for (size_t k = 0; k < report.logs.size(); ++k) {
      if (report.obstacle_theta[k] >= report.path_theta_end - 1e-9) continue;
      ++considered;
      last_considered = static_cast<int>(k);
      if (report.logs[k].theta_init > report.obstacle_theta[k]) {
        if (first_ahead < 0) first_ahead = static_cast<int>(k);
      } else if (first_ahead >= 0) {
        first_ahead = -1; // fell back behind
      }
    }
    s.overtake = first_ahead >= 0 && considered >= 2 &&
                 first_ahead < last_considered;
  }
  return s;
}

/// Receding-horizon loop: disturb, project, build, solve, apply the first
/// input, advance the obstacles, log. One MPC solve per footstep.
inline RunReport run(const Scenario& scenario) {
  RunReport report;
  const Path& path = scenario.path;
  const double T = scenario.lip.step_duration;
  const double theta_end = path.theta_end();
  const double eps_goal = scenario.goal_eps_frac * theta_end;

  std::vector<Vec2> impulses;
  if (scenario.disturbance) {
    impulses = detail::impulse_schedule(*scenario.disturbance, T,
                                        scenario.max_steps,
                                        scenario.robot_mass);
  }

  SqpSolver solver(scenario.solver);
  LipState state = scenario.initial_state;
  Foot stance = scenario.initial_stance;
  std::vector<Obstacle> obstacles = scenario.obstacles;
  std::optional<SolveResult> previous;
  double theta_prev = 0.0;
  bool have_theta_prev = false;
  const double back_window = std::max(1.0, 5.0 * scenario.v_max);

  report.status = RunStatus::max_steps;
  report.path_theta_end = theta_end;
  for (int k = 0; k < scenario.max_steps; ++k) {
    if (k < static_cast<int>(impulses.size())) {
      state = apply_impulse(state, impulses[k].x(), impulses[k].y());
    }

    // theta_init: closest point, searched behind no further than the
    // back window so closed paths do not wrap to the start.
    const double lo = have_theta_prev
                          ? std::max(0.0, theta_prev - back_window)
                          : 0.0;
    const double theta_init = path.project(output(state), lo, theta_end);
    theta_prev = theta_init;
    have_theta_prev = true;

    const Vec2 on_path = path.eval(theta_init).point;
    const double cart_err = (output(state) - on_path).norm();
    if (theta_init >= theta_end - eps_goal && cart_err <= scenario.goal_eps_xy) {
      report.status = RunStatus::completed;
      break;
    }

    OcpSpec spec = scenario.ocp_spec();
    spec.obstacles = obstacles;
    const Foot first_placed = other_foot(stance);
    Nlp nlp(spec, state, theta_init, path, first_placed);

    VectorXd z0 = previous ? warm_start(*previous, spec)
                           : detail::nominal_guess(spec, state, first_placed);
    SolveResult result = solver.solve(nlp, z0);
    auto acceptable = [&](const SolveResult& r) {
      return (r.status == SolveStatus::optimal ||
              r.status == SolveStatus::max_iter) &&
             r.constraint_violation <= 1e-6;
    };
    if (!acceptable(result)) {
      // One cold-start retry, then give up honestly.
      result = solver.solve(nlp, VectorXd::Zero(nlp.dim()));
      if (!acceptable(result)) {
        report.status = RunStatus::failed;
        break;
      }
    }

    const int N = spec.horizon;
    StepLog log;
    log.k = k;
    log.time = k * T;
    log.state = state;
    log.input = LipInput::from_vec(result.z.segment<3>(0));
    log.theta_init = theta_init;
    log.v_applied = result.z(3 * N);
    log.v_avg = result.z.tail(N).mean();
    const Vec2 ebar = contour_lag_error(output(state), path, theta_init);
    log.e_contour = ebar(0);
    log.e_lag = ebar(1);
    log.e_cart = cart_err;
    bool collided = false;
    for (const Obstacle& obs : obstacles) {
      ObstacleLog ol;
      ol.clearance = (output(state) - obs.position).norm();
      ol.b = barrier(output(state), obs.position, obs.effective_radius());
      if (ol.b < 0.0) collided = true;
      log.obstacles.push_back(ol);
    }
    log.solver_status = to_string(result.status);
    log.solver_iterations = result.iterations;
    log.solver_kkt = result.kkt_residual;
    log.solver_time = result.solve_time;
    if (k < static_cast<int>(impulses.size())) {
      log.impulse_dvx = impulses[k].x();
      log.impulse_dvy = impulses[k].y();
    }
    report.logs.push_back(log);
    if (!obstacles.empty()) {
      report.obstacle_theta.push_back(path.project(obstacles[0].position));
    }
    if (collided) {
      report.status = RunStatus::failed;
      break;
    }

    state = step(state, log.input, scenario.lip);
    for (Obstacle& obs : obstacles) obs.position += T * obs.velocity;
    stance = other_foot(stance);
    previous = result;
  }

  report.summary = summarize(report);
  return report;
}

} // namespace lipmpcc

#endif // LIPMPCC_SIMULATOR_HPP
