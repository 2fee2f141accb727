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

#pragma once

// Monte-Carlo experiment runner: configuration, single drops, sweeps and
// their CSV/SVG persistence.
//
// A drop redraws user positions and channels from RandomSource(seed, drop).
// The homogeneous point of a drop reuses the HetNet channels with the small
// cells removed, so HetNet/homogeneous and M/N comparisons are paired.

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoebf/channel.hpp"
#include "qoebf/qoe.hpp"
#include "qoebf/sdr_common.hpp"
#include "qoebf/solution.hpp"

namespace qoebf::bench {

enum class Service { kWeb, kVideo };

std::string to_string(Service service);
/// Accepts "web" and "video".
Service service_from_string(const std::string& name);

double dbm_to_mw(double dbm);

struct WebConfig {
  std::vector<double> fs_kb{18, 30, 50, 100, 200, 320, 400, 500, 650, 1000};  // per user
  // K1, K2 are calibrated so MOS(rate_min) = 1 and MOS(rate_max) = 5 at fs_avg_kb.
  double calibration_rate_min = 2.0;  // bit/s/Hz
  double calibration_rate_max = 7.0;
  double calibration_fs_kb = 320.0;
  double mss_bytes = 1460.0;
  double rtt_s = 0.030;
  double mos_min = 1.0;
};

struct VideoConfig {
  qoe::VideoServiceParams params;  // B is overwritten by the config bandwidth
  double mos_min = 1.0;
};

struct ExperimentConfig {
  // M, N and num_small are set per sweep point; num_small here is the HetNet count.
  channel::Topology topology;
  double mbs_cap_dbm = 18.0;  // per antenna
  double sbs_cap_dbm = -10.9;
  double noise_dbm = -127.0;
  double symbol_power_mw = 1.0;
  double bandwidth_hz = 15000.0;
  double shadow_sigma_db = 7.0;
  double qos_rate_min = 2.0;  // bit/s/Hz; sinr_min = 2^rate - 1

  std::vector<Service> services{Service::kWeb, Service::kVideo};
  WebConfig web;
  VideoConfig video;

  std::vector<int> M_list{20, 30, 40, 50, 60, 70, 80};
  std::vector<int> N_list{1, 2, 3};
  bool include_homogeneous = true;
  int drops = 20;
  std::uint64_t seed = 1;

  sdr::SpcaOptions spca;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  qoe::WebServiceParams web_params(int user) const;
  qoe::VideoServiceParams video_params() const;
  double sinr_min() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Ns = 0 is the homogeneous network, reported with N = 0.
struct SweepPoint {
  Service service = Service::kWeb;
  int M = 0;
  int N = 0;
  int Ns = 0;

  auto operator<=>(const SweepPoint&) const = default;
};

/// Per service M ascending, homogeneous first, then N ascending.
std::vector<SweepPoint> sweep_points(const ExperimentConfig& config);

struct DropResult {
  SweepPoint point;
  int drop = 0;
  // Converged or iteration-limited SPCA whose extracted beamformers meet
  // every cap and floor. When the QoE floors are unattainable the drop is
  // re-solved with the QoS floors alone; its metrics are kept but it stays
  // infeasible.
  bool feasible = false;
  solution::Status status = solution::Status::kInfeasible;
  std::string message;
  int spca_iterations = 0;
  double wall_ms = 0.0;
  bool has_metrics = false;
  std::vector<solution::UserMetrics> users;

  /// Aggregated clipped MOS divided by K; NaN without metrics.
  double mean_mos() const;
};

/// The link and requirements of one drop at one sweep point.
struct DropInstance {
  sdr::LinkSpec link;
  std::vector<qoe::QoeRequirement> requirements;
  std::uint64_t randomization_seed = 0;
};

DropInstance make_instance(const ExperimentConfig& config, const SweepPoint& point, int drop);

/// Runs SPCA on the instance with the given mos_min floors.
solution::BeamformingSolution solve_instance(const ExperimentConfig& config, Service service,
                                             const DropInstance& instance);

/// wall_ms stays 0 unless record_timing, keeping results byte-reproducible.
DropResult run_drop(const ExperimentConfig& config, const SweepPoint& point, int drop,
                    bool record_timing = false);

struct SweepOptions {
  int jobs = 1;
  bool record_timing = false;
  // Workers take no new drop once this is set; finished drops are returned.
  const std::atomic<bool>* stop = nullptr;
  std::function<void(const DropResult&, std::size_t done, std::size_t total)> progress;
};

/// Sorted by (point, drop) regardless of completion order; web sorts before video.
std::vector<DropResult> run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

struct PointSummary {
  SweepPoint point;
  int drops = 0;
  int feasible_drops = 0;
  double infeasible_rate = 0.0;
  double mean_mos = 0.0;       // over feasible drops; NaN when there are none
  double ci_half_width = 0.0;  // 1.96 s / sqrt(n), 0 when n < 2
};

std::vector<PointSummary> summarize(const std::vector<DropResult>& results);

/// service,M,N,Ns,drop,user,feasible,sinr,rate_bps_hz,mos_raw,mos_clipped,spca_iters,wall_ms
void write_results_csv(std::ostream& out, const std::vector<DropResult>& results);
void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& summary);
/// Mean MOS vs M, one line for the homogeneous network and one per HetNet N.
std::string render_mos_chart(const std::vector<PointSummary>& summary, Service service);

/// Writes results.csv, summary.csv and mos_<service>.svg into directory.
void write_outputs(const std::string& directory, const std::vector<DropResult>& results);

}  // namespace qoebf::bench
