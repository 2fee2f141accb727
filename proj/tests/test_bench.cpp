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

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qoebf/bench.hpp"

namespace qoebf::bench {
namespace {

// One macro user and one small-cell user on 2-antenna BSs: each drop solves
// in milliseconds.
ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.topology.num_small = 1;
  c.topology.macro_users = 1;
  c.web.fs_kb = {50, 320};
  c.M_list = {2, 3};
  c.N_list = {1, 2};
  c.drops = 3;
  c.seed = 5;
  c.validate();
  return c;
}

std::string csv_of(const std::vector<DropResult>& results) {
  std::ostringstream out;
  write_results_csv(out, results);
  return out.str();
}

TEST(Units, DbmToMw) {
  EXPECT_NEAR(dbm_to_mw(18.0), 63.096, 1e-3);
  EXPECT_NEAR(dbm_to_mw(-10.9), 0.08128, 1e-5);
  EXPECT_DOUBLE_EQ(dbm_to_mw(0.0), 1.0);
}

TEST(Config, ShippedDefaultConfigMatchesBuiltins) {
  const ExperimentConfig shipped = load_config(std::string(QOEBF_SOURCE_DIR) + "/configs/paper.json");
  EXPECT_EQ(to_json(shipped), to_json(ExperimentConfig{}));
  const ExperimentConfig d;
  EXPECT_EQ(d.topology.num_users(), 10);
  EXPECT_EQ(d.web.fs_kb.size(), 10u);
  EXPECT_DOUBLE_EQ(d.sinr_min(), 3.0);
  EXPECT_DOUBLE_EQ(d.video_params().B, 15000.0);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c = tiny_config();
  c.web.mos_min = 2.0;
  c.video.mos_min = 2.5;
  c.services = {Service::kVideo};
  c.include_homogeneous = false;
  c.spca.epsilon = 1e-4;
  const nlohmann::json j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(nlohmann::json::parse(j.dump()))), j);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  nlohmann::json j = to_json(tiny_config());
  j["sweep"]["dorps"] = 3;
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  j = to_json(tiny_config());
  j["colour"] = "blue";
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  j = to_json(tiny_config());
  j["sweep"]["drops"] = 0;
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  j = to_json(tiny_config());
  j["web"]["fs_kb"] = {50};
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  j = to_json(tiny_config());
  j["services"] = {"audio"};
  EXPECT_THROW(config_from_json(j), std::invalid_argument);
  EXPECT_THROW(load_config("/nonexistent/config.json"), std::runtime_error);
}

TEST(Config, UnitMosMinAddsNoQoeFloor) {
  const ExperimentConfig c;
  for (int k = 0; k < c.topology.num_users(); ++k) {
    EXPECT_DOUBLE_EQ(qoe::effective_sinr_floor({1.0, c.sinr_min()}, c.web_params(k)), c.sinr_min());
  }
  // At the calibration page size A(1) coincides with the QoS floor anyway.
  qoe::WebServiceParams p = c.web_params(5);
  ASSERT_DOUBLE_EQ(p.FS, 320 * qoe::kBitsPerKilobyte);
  EXPECT_NEAR(qoe::web_sinr_threshold(1.0, p), c.sinr_min(), 0.01);
}

TEST(SweepPoints, OrderAndHomogeneousEncoding) {
  const ExperimentConfig c = tiny_config();
  const std::vector<SweepPoint> pts = sweep_points(c);
  ASSERT_EQ(pts.size(), 2u * 2u * 3u);
  EXPECT_EQ(pts[0].service, Service::kWeb);
  EXPECT_EQ(pts[0].M, 2);
  EXPECT_EQ(pts[0].N, 0);
  EXPECT_EQ(pts[0].Ns, 0);
  EXPECT_EQ(pts[1].N, 1);
  EXPECT_EQ(pts[1].Ns, 1);
  EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));
}

TEST(MakeInstance, HomogeneousPointHasNoSmallCellVariables) {
  const ExperimentConfig c = tiny_config();
  const DropInstance het = make_instance(c, {Service::kWeb, 3, 2, 1}, 1);
  const DropInstance hom = make_instance(c, {Service::kWeb, 3, 0, 0}, 1);
  EXPECT_EQ(het.link.num_bs(), 2);
  EXPECT_EQ(hom.link.num_bs(), 1);
  ASSERT_EQ(hom.link.num_users(), het.link.num_users());
  for (int k = 0; k < hom.link.num_users(); ++k) {
    // Same drop, same macro channel: the comparison is paired.
    EXPECT_TRUE(hom.link.channels.h[k][0] == het.link.channels.h[k][0]);
  }
  EXPECT_NEAR(hom.link.power_caps[0](0), dbm_to_mw(18.0), 1e-12);
  EXPECT_NEAR(het.link.power_caps[1](0), dbm_to_mw(-10.9), 1e-12);
  EXPECT_NEAR(het.link.noise[0], dbm_to_mw(-127.0), 1e-24);
  EXPECT_THROW(make_instance(c, {Service::kWeb, 3, 0, 0}, -1), std::invalid_argument);
}

TEST(RunDrop, DeterministicAndFeasible) {
  const ExperimentConfig c = tiny_config();
  for (Service s : {Service::kWeb, Service::kVideo}) {
    const SweepPoint p{s, 3, 2, 1};
    const DropResult a = run_drop(c, p, 2);
    const DropResult b = run_drop(c, p, 2);
    EXPECT_EQ(csv_of({a}), csv_of({b}));
    EXPECT_TRUE(a.feasible) << a.message;
    EXPECT_EQ(a.wall_ms, 0.0);
    ASSERT_TRUE(a.has_metrics);
    EXPECT_EQ(a.users.size(), 2u);
    for (const auto& u : a.users) EXPECT_GE(u.sinr, c.sinr_min() * (1 - 1e-4));
  }
}

TEST(RunDrop, QoeFloorHeldOnFeasibleDrops) {
  ExperimentConfig c = tiny_config();
  c.web.mos_min = 2.0;
  c.video.mos_min = 2.5;
  for (Service s : {Service::kWeb, Service::kVideo}) {
    const double m = s == Service::kWeb ? 2.0 : 2.5;
    int checked = 0;
    for (int drop = 0; drop < 3; ++drop) {
      const DropResult r = run_drop(c, {s, 3, 2, 1}, drop);
      if (!r.feasible) continue;
      ++checked;
      for (const auto& u : r.users) EXPECT_GE(u.mos_clipped, m - 0.05);
    }
    EXPECT_GT(checked, 0);
  }
}

TEST(RunSweep, CsvSchemaRowsAndThreadIndependence) {
  const ExperimentConfig c = tiny_config();
  SweepOptions one;
  SweepOptions two;
  two.jobs = 2;
  std::size_t seen = 0;
  two.progress = [&](const DropResult&, std::size_t done, std::size_t total) {
    seen = done;
    EXPECT_EQ(total, 36u);
  };
  const auto a = run_sweep(c, one);
  const auto b = run_sweep(c, two);
  EXPECT_EQ(seen, 36u);
  ASSERT_EQ(a.size(), 36u);
  const std::string csv = csv_of(a);
  EXPECT_EQ(csv, csv_of(b));
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header,
            "service,M,N,Ns,drop,user,feasible,sinr,rate_bps_hz,mos_raw,mos_clipped,spca_iters,wall_ms");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12) << line;
  }
  EXPECT_EQ(rows, 36 * 2);
}

TEST(RunSweep, StopFlagEndsEarly) {
  const std::atomic<bool> stop{true};
  SweepOptions o;
  o.stop = &stop;
  EXPECT_TRUE(run_sweep(tiny_config(), o).empty());
}

DropResult synthetic(SweepPoint p, int drop, bool feasible, std::vector<double> mos) {
  DropResult r;
  r.point = p;
  r.drop = drop;
  r.feasible = feasible;
  r.has_metrics = true;
  for (double m : mos) {
    solution::UserMetrics u;
    u.mos_clipped = m;
    u.mos_raw = m;
    r.users.push_back(u);
  }
  return r;
}

TEST(Summarize, MeanOverFeasibleDropsOfPerUserAverage) {
  const SweepPoint p{Service::kWeb, 8, 2, 2};
  const std::vector<DropResult> results = {
      synthetic(p, 0, true, {1.0, 3.0}),   // 2
      synthetic(p, 1, true, {4.0, 4.0}),   // 4
      synthetic(p, 2, false, {5.0, 5.0}),  // excluded
      synthetic(p, 3, true, {3.0, 3.0}),   // 3
  };
  const auto s = summarize(results);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].drops, 4);
  EXPECT_EQ(s[0].feasible_drops, 3);
  EXPECT_DOUBLE_EQ(s[0].infeasible_rate, 0.25);
  EXPECT_DOUBLE_EQ(s[0].mean_mos, 3.0);
  EXPECT_NEAR(s[0].ci_half_width, 1.96 * 1.0 / std::sqrt(3.0), 1e-12);

  const auto none = summarize({synthetic(p, 0, false, {2.0})});
  EXPECT_TRUE(std::isnan(none[0].mean_mos));
  EXPECT_EQ(none[0].ci_half_width, 0.0);
}

TEST(Chart, OneLinePerNetworkType) {
  std::vector<DropResult> results;
  for (int M : {8, 16}) {
    results.push_back(synthetic({Service::kVideo, M, 0, 0}, 0, true, {2.0}));
    results.push_back(synthetic({Service::kVideo, M, 1, 2}, 0, true, {2.5}));
    results.push_back(synthetic({Service::kVideo, M, 3, 2}, 0, true, {3.0}));
  }
  const std::string svg = render_mos_chart(summarize(results), Service::kVideo);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("Homogeneous"), std::string::npos);
  EXPECT_NE(svg.find("HetNet N=1"), std::string::npos);
  EXPECT_NE(svg.find("HetNet N=3"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg, render_mos_chart(summarize(results), Service::kVideo));
}

TEST(Outputs, WritesCsvAndCharts) {
  const auto dir = std::filesystem::temp_directory_path() / "qoebf_test_outputs";
  std::filesystem::remove_all(dir);
  const SweepPoint p{Service::kWeb, 8, 0, 0};
  write_outputs(dir.string(), {synthetic(p, 0, true, {2.0, 3.0})});
  for (const char* f : {"results.csv", "summary.csv", "mos_web.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "summary.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "service,M,N,Ns,drops,feasible_drops,infeasible_rate,mean_mos,ci_half_width");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace qoebf::bench
