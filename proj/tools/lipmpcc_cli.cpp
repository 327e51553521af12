// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lipmpcc/io.hpp"
#include "lipmpcc/scenario.hpp"
#include "lipmpcc/simulator.hpp"
#include "lipmpcc/svg.hpp"

namespace fs = std::filesystem;
using namespace lipmpcc;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string default_out_dir() {
  if (const char* env = std::getenv("LIPMPCC_OUT_DIR")) return env;
  return "runs";
}

void write_plots(const fs::path& dir, const Path& path,
                 const std::vector<StepLog>& logs, double v_max) {
  svg::write_trajectory_svg((dir / "trajectory.svg").string(), path, logs);
  svg::write_errors_svg((dir / "errors.svg").string(), logs);
  svg::write_progress_svg((dir / "progress.svg").string(), logs, v_max);
}

// Runs one scenario file into out_dir/<name>/ and returns the report status.
RunStatus run_one(const fs::path& file, const fs::path& out_root,
                  std::optional<uint64_t> seed_override, bool quiet) {
  Scenario s = parse_scenario(slurp(file));
  if (seed_override) {
    s.seed = *seed_override;
    if (s.disturbance) s.disturbance->seed = *seed_override;
  }
  const fs::path dir = out_root / s.name;
  fs::create_directories(dir);
  const RunReport report = run(s);
  write_run_outputs(dir.string(), report);
  fs::copy_file(file, dir / "scenario.json",
                fs::copy_options::overwrite_existing);
  write_plots(dir, s.path, report.logs, s.v_max);
  if (!quiet) {
    std::cout << s.name << ": " << to_string(report.status) << " in "
              << report.logs.size() << " steps ("
              << summary_json(report.summary).dump() << ")\n";
  }
  return report.status;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPCC footstep planning scenarios on the 3D LIP model"};
  app.require_subcommand(1);

  std::string scenario_file, sweep_dir, plot_dir;
  std::string out_dir = default_out_dir();
  uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* cmd_run = app.add_subcommand("run", "run a single scenario file");
  cmd_run->add_option("scenario", scenario_file, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_run->add_option("--out", out_dir, "output directory root");
  cmd_run->add_option("--seed", seed, "override scenario rng seed")
      ->each([&](const std::string&) { seed_set = true; });

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run every scenario in a directory");
  cmd_sweep->add_option("dir", sweep_dir, "directory of scenario JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd_sweep->add_option("--out", out_dir, "output directory root");

  CLI::App* cmd_plot =
      app.add_subcommand("plot", "regenerate SVGs from a finished run dir");
  cmd_plot->add_option("run_dir", plot_dir, "run output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const RunStatus st =
          run_one(scenario_file, out_dir,
                  seed_set ? std::optional<uint64_t>(seed) : std::nullopt,
                  false);
      return st == RunStatus::completed ? 0 : 1;
    }

    if (cmd_sweep->parsed()) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(sweep_dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
      }
      if (files.empty()) {
        std::cerr << "sweep: no .json scenario files in " << sweep_dir << "\n";
        return 1;
      }
      std::sort(files.begin(), files.end());
      std::vector<std::future<RunStatus>> jobs;
      for (const fs::path& f : files) {
        jobs.push_back(std::async(std::launch::async, run_one, f,
                                  fs::path(out_dir), std::nullopt, true));
      }
      int failures = 0;
      for (size_t i = 0; i < jobs.size(); ++i) {
        const RunStatus st = jobs[i].get();
        std::cout << files[i].stem().string() << ": " << to_string(st) << "\n";
        if (st != RunStatus::completed) ++failures;
      }
      return failures == 0 ? 0 : 1;
    }

    if (cmd_plot->parsed()) {
      const fs::path dir(plot_dir);
      if (!fs::exists(dir / "steps.csv") ||
          !fs::exists(dir / "scenario.json")) {
        std::cerr << "plot: " << plot_dir
                  << " does not contain steps.csv and scenario.json\n";
        return 1;
      }
      const Scenario s = parse_scenario(slurp(dir / "scenario.json"));
      std::ifstream csv(dir / "steps.csv");
      const std::vector<StepLog> logs = read_steps_csv(csv);
      if (logs.empty()) {
        std::cerr << "plot: steps.csv has no rows\n";
        return 1;
      }
      write_plots(dir, s.path, logs, s.v_max);
      std::cout << "wrote trajectory.svg, errors.svg, progress.svg in "
                << plot_dir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
