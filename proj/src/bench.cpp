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

#include "qoebf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "qoebf/sdr_video.hpp"
#include "qoebf/sdr_web.hpp"
#include "qoebf/svg_chart.hpp"

namespace qoebf::bench {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
  const std::set<std::string> names(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!names.count(item.key())) {
      throw std::invalid_argument("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

// %.17g round-trips a double; NaN is spelled "nan" on every platform.
std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_ms(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::vector<qoe::QoeRequirement> requirements_for(const ExperimentConfig& config, Service service,
                                                  int users, bool qos_only) {
  qoe::QoeRequirement req;
  req.sinr_min = config.sinr_min();
  req.mos_min = qos_only ? 1.0
                         : (service == Service::kWeb ? config.web.mos_min : config.video.mos_min);
  return std::vector<qoe::QoeRequirement>(static_cast<std::size_t>(users), req);
}

bool has_qoe_floor(const ExperimentConfig& config, Service service) {
  return (service == Service::kWeb ? config.web.mos_min : config.video.mos_min) > 1.0;
}

}  // namespace

std::string to_string(Service service) {
  return service == Service::kWeb ? "web" : "video";
}

Service service_from_string(const std::string& name) {
  if (name == "web") return Service::kWeb;
  if (name == "video") return Service::kVideo;
  throw std::invalid_argument("unknown service \"" + name + "\" (expected web or video)");
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

void ExperimentConfig::validate() const {
  channel::Topology t = topology;
  for (int M : M_list) {
    t.M = M;
    for (int N : N_list) {
      t.N = N;
      t.validate();
    }
  }
  if (M_list.empty() || N_list.empty()) throw std::invalid_argument("M and N lists must be non-empty");
  if (services.empty()) throw std::invalid_argument("at least one service is required");
  if (drops < 1) throw std::invalid_argument("drops must be >= 1");
  for (double v : {symbol_power_mw, bandwidth_hz, qos_rate_min}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("symbol power, bandwidth and QoS rate must be positive");
    }
  }
  if (!(shadow_sigma_db >= 0.0)) throw std::invalid_argument("shadow sigma must be >= 0");
  for (double v : {mbs_cap_dbm, sbs_cap_dbm, noise_dbm}) {
    if (!std::isfinite(v)) throw std::invalid_argument("powers in dBm must be finite");
  }
  if (std::find(services.begin(), services.end(), Service::kWeb) != services.end()) {
    if (static_cast<int>(web.fs_kb.size()) != topology.num_users()) {
      throw std::invalid_argument("web.fs_kb needs one page size per user (" +
                                  std::to_string(topology.num_users()) + ")");
    }
    if (!(web.calibration_rate_min > 0.0 && web.calibration_rate_max > web.calibration_rate_min)) {
      throw std::invalid_argument("web calibration needs 0 < rate_min < rate_max");
    }
    for (int k = 0; k < topology.num_users(); ++k) web_params(k).validate();
  }
  video_params().validate();
  for (double m : {web.mos_min, video.mos_min}) {
    if (!(m >= 1.0 && m <= 5.0)) throw std::invalid_argument("mos_min must lie in [1, 5]");
  }
  if (!(spca.epsilon > 0.0) || spca.max_iterations < 1 || spca.randomization_draws < 0) {
    throw std::invalid_argument("SPCA needs epsilon > 0, max_iterations >= 1, draws >= 0");
  }
}

qoe::WebServiceParams ExperimentConfig::web_params(int user) const {
  const qoe::WebConstants c =
      qoe::calibrate_web_constants(web.calibration_rate_min, web.calibration_rate_max,
                                   web.calibration_fs_kb * qoe::kBitsPerKilobyte, bandwidth_hz);
  qoe::WebServiceParams p;
  p.K1 = c.K1;
  p.K2 = c.K2;
  p.FS = web.fs_kb.at(static_cast<std::size_t>(user)) * qoe::kBitsPerKilobyte;
  p.MSS = web.mss_bytes * 8.0;
  p.RTT = web.rtt_s;
  p.B = bandwidth_hz;
  return p;
}

qoe::VideoServiceParams ExperimentConfig::video_params() const {
  qoe::VideoServiceParams p = video.params;
  p.B = bandwidth_hz;
  return p;
}

double ExperimentConfig::sinr_min() const { return std::exp2(qos_rate_min) - 1.0; }

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j,
                 {"topology", "power", "bandwidth_hz", "shadow_sigma_db", "qos_rate_min",
                  "services", "web", "video", "sweep", "spca"},
                 "config");
  if (j.contains("topology")) {
    const json& t = j.at("topology");
    reject_unknown(t,
                   {"macro_radius_km", "macro_min_radius_km", "small_radius_km",
                    "small_min_radius_km", "sbs_ring_radius_km", "small_cells", "macro_users",
                    "users_per_small_cell"},
                   "topology");
    read(t, "macro_radius_km", c.topology.macro_radius);
    read(t, "macro_min_radius_km", c.topology.macro_min_radius);
    read(t, "small_radius_km", c.topology.small_radius);
    read(t, "small_min_radius_km", c.topology.small_min_radius);
    read(t, "sbs_ring_radius_km", c.topology.sbs_ring_radius);
    read(t, "small_cells", c.topology.num_small);
    read(t, "macro_users", c.topology.macro_users);
    read(t, "users_per_small_cell", c.topology.per_small_users);
  }
  if (j.contains("power")) {
    const json& p = j.at("power");
    reject_unknown(p, {"mbs_cap_dbm", "sbs_cap_dbm", "noise_dbm", "symbol_power_mw"}, "power");
    read(p, "mbs_cap_dbm", c.mbs_cap_dbm);
    read(p, "sbs_cap_dbm", c.sbs_cap_dbm);
    read(p, "noise_dbm", c.noise_dbm);
    read(p, "symbol_power_mw", c.symbol_power_mw);
  }
  read(j, "bandwidth_hz", c.bandwidth_hz);
  read(j, "shadow_sigma_db", c.shadow_sigma_db);
  read(j, "qos_rate_min", c.qos_rate_min);
  if (j.contains("services")) {
    c.services.clear();
    for (const auto& s : j.at("services")) c.services.push_back(service_from_string(s.get<std::string>()));
  }
  if (j.contains("web")) {
    const json& w = j.at("web");
    reject_unknown(w,
                   {"fs_kb", "calibration_rate_min", "calibration_rate_max", "calibration_fs_kb",
                    "mss_bytes", "rtt_s", "mos_min"},
                   "web");
    read(w, "fs_kb", c.web.fs_kb);
    read(w, "calibration_rate_min", c.web.calibration_rate_min);
    read(w, "calibration_rate_max", c.web.calibration_rate_max);
    read(w, "calibration_fs_kb", c.web.calibration_fs_kb);
    read(w, "mss_bytes", c.web.mss_bytes);
    read(w, "rtt_s", c.web.rtt_s);
    read(w, "mos_min", c.web.mos_min);
  }
  if (j.contains("video")) {
    const json& v = j.at("video");
    reject_unknown(v, {"g", "e", "u", "v", "r", "mos_min"}, "video");
    read(v, "g", c.video.params.g);
    read(v, "e", c.video.params.e);
    read(v, "u", c.video.params.u);
    read(v, "v", c.video.params.v);
    read(v, "r", c.video.params.r);
    read(v, "mos_min", c.video.mos_min);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"M", "N", "include_homogeneous", "drops", "seed"}, "sweep");
    read(s, "M", c.M_list);
    read(s, "N", c.N_list);
    read(s, "include_homogeneous", c.include_homogeneous);
    read(s, "drops", c.drops);
    read(s, "seed", c.seed);
  }
  if (j.contains("spca")) {
    const json& s = j.at("spca");
    reject_unknown(s,
                   {"epsilon", "max_iterations", "rank_tolerance", "randomization_draws",
                    "solver_gap_tolerance", "solver_max_iterations"},
                   "spca");
    read(s, "epsilon", c.spca.epsilon);
    read(s, "max_iterations", c.spca.max_iterations);
    read(s, "rank_tolerance", c.spca.rank_tolerance);
    read(s, "randomization_draws", c.spca.randomization_draws);
    read(s, "solver_gap_tolerance", c.spca.solver.gap_tol);
    read(s, "solver_max_iterations", c.spca.solver.max_iterations);
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json services = json::array();
  for (Service s : c.services) services.push_back(to_string(s));
  return {
      {"topology",
       {{"macro_radius_km", c.topology.macro_radius},
        {"macro_min_radius_km", c.topology.macro_min_radius},
        {"small_radius_km", c.topology.small_radius},
        {"small_min_radius_km", c.topology.small_min_radius},
        {"sbs_ring_radius_km", c.topology.sbs_ring_radius},
        {"small_cells", c.topology.num_small},
        {"macro_users", c.topology.macro_users},
        {"users_per_small_cell", c.topology.per_small_users}}},
      {"power",
       {{"mbs_cap_dbm", c.mbs_cap_dbm},
        {"sbs_cap_dbm", c.sbs_cap_dbm},
        {"noise_dbm", c.noise_dbm},
        {"symbol_power_mw", c.symbol_power_mw}}},
      {"bandwidth_hz", c.bandwidth_hz},
      {"shadow_sigma_db", c.shadow_sigma_db},
      {"qos_rate_min", c.qos_rate_min},
      {"services", services},
      {"web",
       {{"fs_kb", c.web.fs_kb},
        {"calibration_rate_min", c.web.calibration_rate_min},
        {"calibration_rate_max", c.web.calibration_rate_max},
        {"calibration_fs_kb", c.web.calibration_fs_kb},
        {"mss_bytes", c.web.mss_bytes},
        {"rtt_s", c.web.rtt_s},
        {"mos_min", c.web.mos_min}}},
      {"video",
       {{"g", c.video.params.g},
        {"e", c.video.params.e},
        {"u", c.video.params.u},
        {"v", c.video.params.v},
        {"r", c.video.params.r},
        {"mos_min", c.video.mos_min}}},
      {"sweep",
       {{"M", c.M_list},
        {"N", c.N_list},
        {"include_homogeneous", c.include_homogeneous},
        {"drops", c.drops},
        {"seed", c.seed}}},
      {"spca",
       {{"epsilon", c.spca.epsilon},
        {"max_iterations", c.spca.max_iterations},
        {"rank_tolerance", c.spca.rank_tolerance},
        {"randomization_draws", c.spca.randomization_draws},
        {"solver_gap_tolerance", c.spca.solver.gap_tol},
        {"solver_max_iterations", c.spca.solver.max_iterations}}},
  };
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config) {
  std::vector<SweepPoint> points;
  for (Service s : config.services) {
    std::vector<int> Ms = config.M_list;
    std::sort(Ms.begin(), Ms.end());
    std::vector<int> Ns = config.N_list;
    std::sort(Ns.begin(), Ns.end());
    for (int M : Ms) {
      if (config.include_homogeneous) points.push_back({s, M, 0, 0});
      if (config.topology.num_small == 0) continue;
      for (int N : Ns) points.push_back({s, M, N, config.topology.num_small});
    }
  }
  return points;
}

double DropResult::mean_mos() const {
  if (!has_metrics || users.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& u : users) sum += u.mos_clipped;
  return sum / static_cast<double>(users.size());
}

DropInstance make_instance(const ExperimentConfig& config, const SweepPoint& point, int drop) {
  if (drop < 0) throw std::invalid_argument("drop index must be >= 0");
  // Users and channels are drawn for the full HetNet at this (M, N) so the
  // homogeneous point shares them.
  channel::Topology topology = config.topology;
  topology.M = point.M;
  topology.N = point.N > 0 ? point.N : 1;
  const channel::RandomSource random(config.seed, static_cast<std::uint64_t>(drop));
  const channel::UserPlacement placement = channel::drop_users(topology, random);
  channel::ChannelSet channels =
      channel::generate_channels(placement, topology, config.shadow_sigma_db, random);
  if (point.Ns == 0) channels = channel::without_small_cells(channels);

  DropInstance out;
  // |w|^2 P_s is the radiated power, so caps and noise are both divided by P_s.
  const double ps = config.symbol_power_mw;
  for (int j = 0; j < channels.num_bs(); ++j) {
    const double cap = dbm_to_mw(j == 0 ? config.mbs_cap_dbm : config.sbs_cap_dbm) / ps;
    out.link.power_caps.push_back(Eigen::VectorXd::Constant(channels.antennas[j], cap));
  }
  out.link.noise.assign(static_cast<std::size_t>(channels.num_users()),
                        dbm_to_mw(config.noise_dbm) / ps);
  out.link.channels = std::move(channels);
  out.requirements = requirements_for(config, point.service, out.link.num_users(), false);

  const std::uint64_t tag = (static_cast<std::uint64_t>(point.M) << 32) |
                            (static_cast<std::uint64_t>(point.N) << 16) |
                            static_cast<std::uint64_t>(point.Ns);
  std::mt19937_64 stream = random.stream(channel::RandomSource::Purpose::kRandomization,
                                         static_cast<std::uint64_t>(point.service), tag);
  out.randomization_seed = stream();
  return out;
}

solution::BeamformingSolution solve_instance(const ExperimentConfig& config, Service service,
                                             const DropInstance& instance) {
  sdr::SpcaOptions options = config.spca;
  options.randomization_seed = instance.randomization_seed;
  if (service == Service::kWeb) {
    sdr::WebProblemSpec spec;
    spec.link = instance.link;
    for (int k = 0; k < instance.link.num_users(); ++k) spec.services.push_back(config.web_params(k));
    spec.requirements = instance.requirements;
    return sdr::spca_solve_web(spec, options);
  }
  sdr::VideoProblemSpec spec;
  spec.link = instance.link;
  spec.service = config.video_params();
  spec.requirements = instance.requirements;
  return sdr::spca_solve_video(spec, options);
}

DropResult run_drop(const ExperimentConfig& config, const SweepPoint& point, int drop,
                    bool record_timing) {
  const auto start = std::chrono::steady_clock::now();
  DropResult out;
  out.point = point;
  out.drop = drop;
  try {
    DropInstance instance = make_instance(config, point, drop);
    solution::BeamformingSolution sol = solve_instance(config, point.service, instance);
    const bool solved = sol.status == solution::Status::kConverged ||
                        sol.status == solution::Status::kIterationLimit ||
                        sol.status == solution::Status::kSolverFailure;
    out.feasible = solved && sol.has_beamformers() &&
                   solution::caps_satisfied(sol, instance.link) && solution::floors_satisfied(sol);
    out.status = sol.status;
    out.message = sol.message;
    out.spca_iterations = sol.spca_iterations;
    if (sol.status == solution::Status::kInfeasible && has_qoe_floor(config, point.service)) {
      instance.requirements =
          requirements_for(config, point.service, instance.link.num_users(), true);
      sol = solve_instance(config, point.service, instance);
      out.spca_iterations = sol.spca_iterations;
      out.message += "; QoS-only retry: " + solution::to_string(sol.status);
    }
    if (sol.has_beamformers()) {
      out.has_metrics = true;
      out.users = sol.users;
    }
  } catch (const std::exception& e) {
    out.feasible = false;
    out.status = solution::Status::kSolverFailure;
    out.message = std::string("exception: ") + e.what();
  }
  if (!out.has_metrics) {
    const int K = config.topology.num_users();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.users.assign(static_cast<std::size_t>(K), solution::UserMetrics{nan, nan, nan, nan});
  }
  if (record_timing) {
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
  }
  return out;
}

std::vector<DropResult> run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  config.validate();
  struct Task {
    SweepPoint point;
    int drop;
  };
  std::vector<Task> tasks;
  for (const SweepPoint& p : sweep_points(config)) {
    for (int d = 0; d < config.drops; ++d) tasks.push_back({p, d});
  }
  std::vector<DropResult> slots(tasks.size());
  std::vector<char> done(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::size_t finished = 0;

  auto worker = [&] {
    for (;;) {
      if (options.stop && options.stop->load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      DropResult r = run_drop(config, tasks[i].point, tasks[i].drop, options.record_timing);
      std::lock_guard<std::mutex> lock(mutex);
      slots[i] = std::move(r);
      done[i] = 1;
      ++finished;
      if (options.progress) options.progress(slots[i], finished, tasks.size());
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  std::vector<DropResult> results;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (done[i]) results.push_back(std::move(slots[i]));
  }
  std::sort(results.begin(), results.end(), [](const DropResult& a, const DropResult& b) {
    if (a.point != b.point) return a.point < b.point;
    return a.drop < b.drop;
  });
  return results;
}

std::vector<PointSummary> summarize(const std::vector<DropResult>& results) {
  std::map<SweepPoint, std::pair<PointSummary, std::vector<double>>> by_point;
  for (const DropResult& r : results) {
    auto& [s, x] = by_point[r.point];
    s.point = r.point;
    ++s.drops;
    if (r.feasible) {
      ++s.feasible_drops;
      x.push_back(r.mean_mos());
    }
  }
  std::vector<PointSummary> out;
  for (auto& [point, entry] : by_point) {
    PointSummary s = entry.first;
    const std::vector<double>& x = entry.second;
    s.infeasible_rate = 1.0 - static_cast<double>(s.feasible_drops) / s.drops;
    if (x.empty()) {
      s.mean_mos = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : x) sum += v;
      s.mean_mos = sum / static_cast<double>(x.size());
      if (x.size() >= 2) {
        double ss = 0.0;
        for (double v : x) ss += (v - s.mean_mos) * (v - s.mean_mos);
        const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
        s.ci_half_width = 1.96 * sd / std::sqrt(static_cast<double>(x.size()));
      }
    }
    out.push_back(s);
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<DropResult>& results) {
  out << "service,M,N,Ns,drop,user,feasible,sinr,rate_bps_hz,mos_raw,mos_clipped,spca_iters,"
         "wall_ms\n";
  for (const DropResult& r : results) {
    for (std::size_t k = 0; k < r.users.size(); ++k) {
      const solution::UserMetrics& u = r.users[k];
      out << to_string(r.point.service) << ',' << r.point.M << ',' << r.point.N << ','
          << r.point.Ns << ',' << r.drop << ',' << k << ',' << (r.feasible ? 1 : 0) << ','
          << format(u.sinr) << ',' << format(u.rate) << ',' << format(u.mos_raw) << ','
          << format(u.mos_clipped) << ',' << r.spca_iterations << ',' << format_ms(r.wall_ms)
          << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& summary) {
  // Infeasible drops are excluded from mean_mos and counted in infeasible_rate.
  out << "service,M,N,Ns,drops,feasible_drops,infeasible_rate,mean_mos,ci_half_width\n";
  for (const PointSummary& s : summary) {
    out << to_string(s.point.service) << ',' << s.point.M << ',' << s.point.N << ','
        << s.point.Ns << ',' << s.drops << ',' << s.feasible_drops << ','
        << format(s.infeasible_rate) << ',' << format(s.mean_mos) << ','
        << format(s.ci_half_width) << '\n';
  }
}

std::string render_mos_chart(const std::vector<PointSummary>& summary, Service service) {
  std::vector<svg::Series> series;
  auto series_for = [&](int N, int Ns) -> svg::Series& {
    const std::string label =
        Ns == 0 ? "Homogeneous" : "HetNet N=" + std::to_string(N) + " (Ns=" + std::to_string(Ns) + ")";
    for (auto& s : series) {
      if (s.label == label) return s;
    }
    series.push_back({label, {}, {}, {}});
    return series.back();
  };
  for (const PointSummary& s : summary) {
    if (s.point.service != service) continue;
    svg::Series& line = series_for(s.point.N, s.point.Ns);
    line.x.push_back(s.point.M);
    line.y.push_back(s.mean_mos);
    line.error.push_back(s.ci_half_width);
  }
  const std::string name = service == Service::kWeb ? "web browsing" : "video";
  return svg::line_chart({"Average MOS vs MBS antennas (" + name + ")", "MBS antennas M",
                          "Average MOS"},
                         series);
}

void write_outputs(const std::string& directory, const std::vector<DropResult>& results) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(directory) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(directory) / name).string());
    return f;
  };
  {
    std::ofstream f = open("results.csv");
    write_results_csv(f, results);
  }
  const std::vector<PointSummary> summary = summarize(results);
  {
    std::ofstream f = open("summary.csv");
    write_summary_csv(f, summary);
  }
  std::set<Service> services;
  for (const PointSummary& s : summary) services.insert(s.point.service);
  for (Service s : services) {
    std::ofstream f = open("mos_" + to_string(s) + ".svg");
    f << render_mos_chart(summary, s);
  }
}

}  // namespace qoebf::bench
