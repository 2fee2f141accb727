// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The qoebf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: web-model calibration tables, single drops and sweeps.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qoebf/bench.hpp"
#include "qoebf/qoe.hpp"
#include "qoebf/solution.hpp"

namespace {

using qoebf::bench::ExperimentConfig;

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : qoebf::bench::load_config(path);
}

int run_calibrate(const std::string& config_path) {
  const ExperimentConfig config = config_or_default(config_path);
  const qoebf::qoe::WebServiceParams first = config.web_params(0);
  std::printf("K1 %.6f\nK2 %.6f\n", first.K1, first.K2);
  const std::vector<double> grid{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5};

  std::printf("\nweb SINR threshold A (linear) by page size\nFS_kB");
  for (double m : grid) std::printf("\tmos%.1f", m);
  std::printf("\n");
  for (std::size_t k = 0; k < config.web.fs_kb.size(); ++k) {
    const auto p = config.web_params(static_cast<int>(k));
    std::printf("%g", config.web.fs_kb[k]);
    for (double m : grid) std::printf("\t%.6g", qoebf::qoe::web_sinr_threshold(m, p));
    std::printf("\n");
  }

  std::printf("\nvideo SINR threshold A (linear)\n");
  const auto video = config.video_params();
  for (double m : grid) {
    std::printf("mos%.1f\t%.6g\n", m, qoebf::qoe::video_sinr_threshold(m, video));
  }
  return 0;
}

int run_solve_drop(const std::string& config_path, const std::string& service_name,
                   std::uint64_t seed, int drop, int M, int N, bool homogeneous) {
  ExperimentConfig config = config_or_default(config_path);
  config.seed = seed;
  qoebf::bench::SweepPoint point;
  point.service = qoebf::bench::service_from_string(service_name);
  point.M = M > 0 ? M : config.M_list.front();
  point.N = homogeneous ? 0 : (N > 0 ? N : config.N_list.front());
  point.Ns = homogeneous ? 0 : config.topology.num_small;

  const auto instance = qoebf::bench::make_instance(config, point, drop);
  const auto sol = qoebf::bench::solve_instance(config, point.service, instance);
  nlohmann::json out = {
      {"service", service_name}, {"M", point.M},   {"N", point.N}, {"Ns", point.Ns},
      {"seed", seed},            {"drop", drop},   {"solution", qoebf::solution::to_json(sol)},
  };
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir, int jobs,
              bool record_timing, bool quiet) {
  const ExperimentConfig config = qoebf::bench::load_config(config_path);
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  qoebf::bench::SweepOptions options;
  options.jobs = jobs;
  options.record_timing = record_timing;
  options.stop = &g_stop;
  if (!quiet) {
    options.progress = [](const qoebf::bench::DropResult& r, std::size_t done, std::size_t total) {
      std::fprintf(stderr, "[%zu/%zu] %s M=%d N=%d Ns=%d drop=%d %s\n", done, total,
                   qoebf::bench::to_string(r.point.service).c_str(), r.point.M, r.point.N,
                   r.point.Ns, r.drop, r.feasible ? "feasible" : "infeasible");
    };
  }
  const auto results = qoebf::bench::run_sweep(config, options);
  qoebf::bench::write_outputs(out_dir, results);
  if (g_stop.load()) {
    std::fprintf(stderr, "interrupted: wrote %zu completed drops to %s\n", results.size(),
                 out_dir.c_str());
    return 130;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QoE-driven beamforming for massive-MIMO HetNets"};
  app.require_subcommand(1);

  std::string config_path;
  auto* calibrate = app.add_subcommand("calibrate", "Print K1, K2 and the SINR threshold tables");
  calibrate->add_option("--config", config_path, "Experiment config (defaults if omitted)")
      ->check(CLI::ExistingFile);

  std::string service = "web";
  std::uint64_t seed = 1;
  int drop = 0, M = 0, N = 0;
  bool homogeneous = false;
  auto* solve = app.add_subcommand("solve-drop", "Solve one drop and print the JSON result");
  solve->add_option("--config", config_path, "Experiment config (defaults if omitted)")
      ->check(CLI::ExistingFile);
  solve->add_option("--service", service, "web or video")
      ->check(CLI::IsMember({"web", "video"}));
  solve->add_option("--seed", seed, "Master seed");
  solve->add_option("--drop", drop, "Drop index")->check(CLI::NonNegativeNumber);
  solve->add_option("--M", M, "MBS antennas (first of the config list if omitted)");
  solve->add_option("--N", N, "SBS antennas (first of the config list if omitted)");
  solve->add_flag("--homogeneous", homogeneous, "Remove the small cells");

  std::string out_dir;
  int jobs = 1;
  bool record_timing = false, quiet = false;
  auto* sweep = app.add_subcommand("sweep", "Run every sweep point and drop; write CSV and SVG");
  sweep->add_option("--config", config_path, "Experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--record-timing", record_timing,
                  "Fill wall_ms (the CSV is then no longer reproducible)");
  sweep->add_flag("--quiet", quiet, "No per-drop progress on stderr");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*calibrate) return run_calibrate(config_path);
    if (*solve) return run_solve_drop(config_path, service, seed, drop, M, N, homogeneous);
    return run_sweep(config_path, out_dir, jobs, record_timing, quiet);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
