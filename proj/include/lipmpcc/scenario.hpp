// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_SCENARIO_HPP
#define LIPMPCC_SCENARIO_HPP

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipmpcc/simulator.hpp"

namespace lipmpcc {

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& j, const std::string& context,
                                const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw std::invalid_argument(context + ": unknown key '" + it.key() + "'");
    }
  }
}

inline const json& require(const json& j, const std::string& context,
                           const std::string& key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(context + ": missing required field '" + key +
                                "'");
  }
  return j.at(key);
}

inline double require_number(const json& j, const std::string& context,
                             const std::string& key) {
  const json& v = require(j, context, key);
  if (!v.is_number()) {
    throw std::invalid_argument(context + ": field '" + key +
                                "' must be a number");
  }
  return v.get<double>();
}

inline Vec2 parse_vec2(const json& j, const std::string& context,
                       const std::string& key) {
  const json& v = require(j, context, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw std::invalid_argument(context + ": field '" + key +
                                "' must be [x, y]");
  }
  return Vec2(v[0].get<double>(), v[1].get<double>());
}

inline Path parse_path(const json& j) {
  const std::string ctx = "path";
  if (!j.is_object()) throw std::invalid_argument("path: must be an object");
  const std::string type =
      require(j, ctx, "type").get<std::string>();
  if (type == "line") {
    reject_unknown_keys(j, ctx, {"type", "start", "end"});
    return Path::line(parse_vec2(j, ctx, "start"), parse_vec2(j, ctx, "end"));
  }
  if (type == "arc") {
    reject_unknown_keys(j, ctx, {"type", "center", "radius", "start_angle",
                                 "sweep"});
    return Path::arc(parse_vec2(j, ctx, "center"),
                     require_number(j, ctx, "radius"),
                     require_number(j, ctx, "start_angle"),
                     require_number(j, ctx, "sweep"));
  }
  if (type == "spline") {
    reject_unknown_keys(j, ctx, {"type", "waypoints"});
    const json& w = require(j, ctx, "waypoints");
    if (!w.is_array() || w.size() < 2) {
      throw std::invalid_argument("path: 'waypoints' must list >= 2 points");
    }
    std::vector<Vec2> pts;
    for (const json& p : w) {
      if (!p.is_array() || p.size() != 2) {
        throw std::invalid_argument("path: waypoint must be [x, y]");
      }
      pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return Path::spline(pts);
  }
  throw std::invalid_argument("path: unknown type '" + type + "'");
}

inline Obstacle parse_obstacle(const json& j, int index) {
  const std::string ctx = "obstacles[" + std::to_string(index) + "]";
  reject_unknown_keys(j, ctx, {"radius", "start", "velocity", "inflation"});
  Obstacle o;
  o.radius = require_number(j, ctx, "radius");
  o.position = parse_vec2(j, ctx, "start");
  o.velocity = j.contains("velocity") ? parse_vec2(j, ctx, "velocity")
                                      : Vec2::Zero();
  o.inflation = j.contains("inflation") ? j.at("inflation").get<double>() : 0.0;
  if (!(o.radius > 0.0) || o.inflation < 0.0) {
    throw std::invalid_argument(ctx + ": radius must be > 0, inflation >= 0");
  }
  return o;
}

} // namespace detail

/// Parse and validate a scenario from its JSON text. Unknown keys are
/// rejected; errors name the offending field.
inline Scenario parse_scenario(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: invalid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("scenario: top level must be an object");
  }
  const std::string ctx = "scenario";
  detail::reject_unknown_keys(
      j, ctx,
      {"name", "path", "lip", "robot_mass", "weights", "input_weight",
       "progress_weight", "horizon", "v_max", "rectangle", "delta_min",
       "delta_max", "gamma", "obstacles", "disturbance", "initial_state",
       "initial_stance", "max_steps", "seed", "output_dir", "goal_eps_frac",
       "goal_eps_xy", "solver"});

  Scenario s;
  s.name = detail::require(j, ctx, "name").get<std::string>();
  s.path = detail::parse_path(detail::require(j, ctx, "path"));

  {
    const json& l = detail::require(j, ctx, "lip");
    detail::reject_unknown_keys(l, "lip", {"height", "step_duration",
                                           "gravity"});
    const double g = l.contains("gravity") ? l.at("gravity").get<double>()
                                           : 9.81;
    s.lip = LipParams(detail::require_number(l, "lip", "height"),
                      detail::require_number(l, "lip", "step_duration"), g);
  }
  if (j.contains("robot_mass")) s.robot_mass = j.at("robot_mass").get<double>();
  if (!(s.robot_mass > 0.0)) {
    throw std::invalid_argument("scenario: 'robot_mass' must be > 0");
  }

  {
    const json& w = detail::require(j, ctx, "weights");
    detail::reject_unknown_keys(
        w, "weights",
        {"mode", "contour_running", "lag_running", "contour_terminal",
         "lag_terminal"});
    const std::string mode =
        detail::require(w, "weights", "mode").get<std::string>();
    if (mode == "contouring") {
      s.weights.mode = ErrorMode::contouring;
    } else if (mode == "cartesian") {
      s.weights.mode = ErrorMode::cartesian;
    } else {
      throw std::invalid_argument(
          "weights: 'mode' must be 'contouring' or 'cartesian'");
    }
    s.weights.contour_running =
        detail::require_number(w, "weights", "contour_running");
    s.weights.lag_running = detail::require_number(w, "weights", "lag_running");
    s.weights.contour_terminal =
        detail::require_number(w, "weights", "contour_terminal");
    s.weights.lag_terminal =
        detail::require_number(w, "weights", "lag_terminal");
    if (s.weights.mode == ErrorMode::cartesian) {
      if (s.weights.contour_running != s.weights.lag_running ||
          s.weights.contour_terminal != s.weights.lag_terminal) {
        throw std::invalid_argument(
            "weights: cartesian mode requires contour_running == lag_running "
            "and contour_terminal == lag_terminal");
      }
      s.weights.alpha = s.weights.contour_running;
      s.weights.beta = s.weights.contour_terminal;
    }
    if (!s.weights.valid()) {
      throw std::invalid_argument("weights: all entries must be > 0");
    }
  }

  {
    const json& r = detail::require(j, ctx, "input_weight");
    if (!r.is_array() || r.size() != 3) {
      throw std::invalid_argument(
          "scenario: 'input_weight' must be [rx, ry, rtheta]");
    }
    s.input_weight = Vec3(r[0].get<double>(), r[1].get<double>(),
                          r[2].get<double>());
  }
  s.progress_weight = detail::require_number(j, ctx, "progress_weight");
  s.horizon = detail::require(j, ctx, "horizon").get<int>();
  s.v_max = detail::require_number(j, ctx, "v_max");

  if (j.contains("rectangle")) {
    const json& r = j.at("rectangle");
    detail::reject_unknown_keys(r, "rectangle", {"lb", "ub"});
    const json& lb = detail::require(r, "rectangle", "lb");
    const json& ub = detail::require(r, "rectangle", "ub");
    if (!lb.is_array() || lb.size() != 3 || !ub.is_array() || ub.size() != 3) {
      throw std::invalid_argument(
          "rectangle: 'lb'/'ub' must be [x, y, theta]");
    }
    for (int i = 0; i < 3; ++i) {
      s.rectangle.lb(i) = lb[i].get<double>();
      s.rectangle.ub(i) = ub[i].get<double>();
    }
  }
  if (j.contains("delta_min")) s.delta_min = j.at("delta_min").get<double>();
  if (j.contains("delta_max")) s.delta_max = j.at("delta_max").get<double>();
  if (s.delta_min >= s.delta_max) {
    throw std::invalid_argument(
        "scenario: 'delta_min' must be < 'delta_max'");
  }
  if (j.contains("gamma")) s.gamma = j.at("gamma").get<double>();

  if (j.contains("obstacles")) {
    const json& arr = j.at("obstacles");
    if (!arr.is_array()) {
      throw std::invalid_argument("scenario: 'obstacles' must be an array");
    }
    for (size_t i = 0; i < arr.size(); ++i) {
      s.obstacles.push_back(
          detail::parse_obstacle(arr[i], static_cast<int>(i)));
    }
  }

  if (j.contains("disturbance")) {
    const json& d = j.at("disturbance");
    detail::reject_unknown_keys(
        d, "disturbance",
        {"force_min", "force_max", "pulse_duration", "max_gap", "seed"});
    DisturbanceModel m;
    if (d.contains("force_min")) m.force_min = d.at("force_min").get<double>();
    if (d.contains("force_max")) m.force_max = d.at("force_max").get<double>();
    if (d.contains("pulse_duration")) {
      m.pulse_duration = d.at("pulse_duration").get<double>();
    }
    if (d.contains("max_gap")) m.max_gap = d.at("max_gap").get<double>();
    if (d.contains("seed")) m.seed = d.at("seed").get<uint64_t>();
    if (!m.valid()) {
      throw std::invalid_argument(
          "disturbance: durations must be > 0 and force_min <= force_max");
    }
    s.disturbance = m;
  }

  {
    const json& x = detail::require(j, ctx, "initial_state");
    detail::reject_unknown_keys(x, "initial_state",
                                {"x", "xdot", "y", "ydot", "theta"});
    s.initial_state.x = detail::require_number(x, "initial_state", "x");
    s.initial_state.xdot = detail::require_number(x, "initial_state", "xdot");
    s.initial_state.y = detail::require_number(x, "initial_state", "y");
    s.initial_state.ydot = detail::require_number(x, "initial_state", "ydot");
    s.initial_state.theta =
        detail::require_number(x, "initial_state", "theta");
  }

  {
    const std::string foot =
        detail::require(j, ctx, "initial_stance").get<std::string>();
    if (foot == "left") {
      s.initial_stance = Foot::left;
    } else if (foot == "right") {
      s.initial_stance = Foot::right;
    } else {
      throw std::invalid_argument(
          "scenario: 'initial_stance' must be 'left' or 'right'");
    }
  }

  s.max_steps = detail::require(j, ctx, "max_steps").get<int>();
  if (s.max_steps < 1) {
    throw std::invalid_argument("scenario: 'max_steps' must be >= 1");
  }
  if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
  if (j.contains("output_dir")) {
    s.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("goal_eps_frac")) {
    s.goal_eps_frac = j.at("goal_eps_frac").get<double>();
  }
  if (j.contains("goal_eps_xy")) {
    s.goal_eps_xy = j.at("goal_eps_xy").get<double>();
  }

  if (j.contains("solver")) {
    const json& c = j.at("solver");
    detail::reject_unknown_keys(
        c, "solver",
        {"max_iterations", "kkt_tolerance", "constraint_tolerance"});
    if (c.contains("max_iterations")) {
      s.solver.max_iterations = c.at("max_iterations").get<int>();
    }
    if (c.contains("kkt_tolerance")) {
      s.solver.kkt_tolerance = c.at("kkt_tolerance").get<double>();
    }
    if (c.contains("constraint_tolerance")) {
      s.solver.constraint_tolerance =
          c.at("constraint_tolerance").get<double>();
    }
  }

  // Cross-field validation through the OCP spec catches the rest
  // (weights already checked, rectangle ordering, gamma range, v_max > 0).
  s.ocp_spec().validate();
  s.solver.validate();
  return s;
}

} // namespace lipmpcc

#endif // LIPMPCC_SCENARIO_HPP
