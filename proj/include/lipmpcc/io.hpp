// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_IO_HPP
#define LIPMPCC_IO_HPP

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipmpcc/simulator.hpp"

namespace lipmpcc {

inline std::vector<std::string> step_csv_header(int num_obstacles) {
  std::vector<std::string> h = {"k",       "time",    "x",          "xdot",
                                "y",       "ydot",    "theta",      "ux",
                                "uy",      "utheta",  "theta_init", "v_applied",
                                "v_avg",   "e_contour", "e_lag",    "e_cart"};
  for (int i = 0; i < num_obstacles; ++i) {
    h.push_back("obs" + std::to_string(i) + "_b");
    h.push_back("obs" + std::to_string(i) + "_clearance");
  }
  h.insert(h.end(), {"solver_status", "solver_iterations", "solver_kkt",
                     "solver_time", "impulse_dvx", "impulse_dvy"});
  return h;
}

inline void write_steps_csv(std::ostream& os, const std::vector<StepLog>& logs) {
  const int n_obs = logs.empty() ? 0 : static_cast<int>(logs[0].obstacles.size());
  const auto header = step_csv_header(n_obs);
  for (size_t i = 0; i < header.size(); ++i) {
    os << (i ? "," : "") << header[i];
  }
  os << "\n";
  os << std::setprecision(17);
  for (const StepLog& l : logs) {
    os << l.k << "," << l.time << "," << l.state.x << "," << l.state.xdot
       << "," << l.state.y << "," << l.state.ydot << "," << l.state.theta
       << "," << l.input.ux << "," << l.input.uy << "," << l.input.utheta
       << "," << l.theta_init << "," << l.v_applied << "," << l.v_avg << ","
       << l.e_contour << "," << l.e_lag << "," << l.e_cart;
    for (const ObstacleLog& ol : l.obstacles) {
      os << "," << ol.b << "," << ol.clearance;
    }
    os << "," << l.solver_status << "," << l.solver_iterations << ","
       << l.solver_kkt << "," << l.solver_time << "," << l.impulse_dvx << ","
       << l.impulse_dvy << "\n";
  }
}

inline std::vector<StepLog> read_steps_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw std::invalid_argument("steps csv: missing header row");
  }
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int n_obs = 0;
  for (const std::string& h : header) {
    if (h.size() > 2 && h.substr(0, 3) == "obs" && h.find("_b") != std::string::npos)
      ++n_obs;
  }
  if (header != step_csv_header(n_obs)) {
    throw std::invalid_argument("steps csv: unexpected header layout");
  }

  std::vector<StepLog> logs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("steps csv: row width mismatch");
    }
    size_t i = 0;
    auto num = [&]() { return std::stod(cells[i++]); };
    StepLog l;
    l.k = static_cast<int>(num());
    l.time = num();
    l.state.x = num();
    l.state.xdot = num();
    l.state.y = num();
    l.state.ydot = num();
    l.state.theta = num();
    l.input.ux = num();
    l.input.uy = num();
    l.input.utheta = num();
    l.theta_init = num();
    l.v_applied = num();
    l.v_avg = num();
    l.e_contour = num();
    l.e_lag = num();
    l.e_cart = num();
    for (int o = 0; o < n_obs; ++o) {
      ObstacleLog ol;
      ol.b = num();
      ol.clearance = num();
      l.obstacles.push_back(ol);
    }
    l.solver_status = cells[i++];
    l.solver_iterations = static_cast<int>(num());
    l.solver_kkt = num();
    l.solver_time = num();
    l.impulse_dvx = num();
    l.impulse_dvy = num();
    logs.push_back(l);
  }
  return logs;
}

inline nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json j;
  j["status"] = s.status;
  j["steps"] = s.steps;
  j["max_abs_contour"] = s.max_abs_contour;
  j["mean_abs_contour"] = s.mean_abs_contour;
  j["max_cart"] = s.max_cart;
  j["min_clearance"] =
      std::isfinite(s.min_clearance) ? s.min_clearance : -1.0;
  j["overtake"] = s.overtake;
  j["mean_v_avg"] = s.mean_v_avg;
  j["mean_solve_time"] = s.mean_solve_time;
  return j;
}

inline void write_run_outputs(const std::string& dir, const RunReport& report) {
  {
    std::ofstream f(dir + "/steps.csv");
    if (!f) throw std::runtime_error("cannot open " + dir + "/steps.csv");
    write_steps_csv(f, report.logs);
  }
  {
    std::ofstream f(dir + "/summary.json");
    if (!f) throw std::runtime_error("cannot open " + dir + "/summary.json");
    f << summary_json(report.summary).dump(2) << "\n";
  }
}

} // namespace lipmpcc

#endif // LIPMPCC_IO_HPP
