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

// Random problem instances shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <random>
#include <vector>

#include "qoebf/bench.hpp"
#include "qoebf/channel.hpp"
#include "qoebf/qoe.hpp"
#include "qoebf/sdr_common.hpp"
#include "qoebf/sdr_video.hpp"
#include "qoebf/sdr_web.hpp"

namespace qoebf::testing {

/// Two-tier drop with macro_users + num_small users at the default powers and noise.
inline sdr::LinkSpec drop_link(int macro_users, int num_small, int M, int N, std::uint64_t seed,
                               std::uint64_t drop = 0) {
  channel::Topology t;
  t.macro_users = macro_users;
  t.num_small = num_small;
  t.per_small_users = 1;
  t.M = M;
  t.N = N;
  const channel::RandomSource random(seed, drop);
  const auto placement = channel::drop_users(t, random);
  sdr::LinkSpec link;
  link.channels = channel::generate_channels(placement, t, 7.0, random);
  for (int j = 0; j < link.channels.num_bs(); ++j) {
    const double cap = bench::dbm_to_mw(j == 0 ? 18.0 : -10.9);
    link.power_caps.push_back(Eigen::VectorXd::Constant(link.channels.antennas[j], cap));
  }
  link.noise.assign(static_cast<std::size_t>(link.num_users()), bench::dbm_to_mw(-127.0));
  return link;
}

/// One BS with M antennas and a single user; channel entries CN(0, 1).
inline sdr::LinkSpec single_user_link(int M, double cap, double noise, std::mt19937_64& rng) {
  sdr::LinkSpec link;
  link.channels.antennas = {M};
  link.channels.cell = {0};
  link.channels.gain = {{1.0}};
  ComplexVector h(M);
  for (int q = 0; q < M; ++q) h(q) = channel::standard_complex_normal(rng);
  link.channels.h = {{h}};
  link.power_caps = {Eigen::VectorXd::Constant(M, cap)};
  link.noise = {noise};
  return link;
}

inline sdr::WebProblemSpec web_spec(const sdr::LinkSpec& link, double sinr_min,
                                    double mos_min = 1.0) {
  static const double kFs[] = {50, 320, 500, 1000, 18, 200};
  sdr::WebProblemSpec spec;
  spec.link = link;
  for (int k = 0; k < link.num_users(); ++k) {
    qoe::WebServiceParams p;
    p.FS = kFs[k % 6] * qoe::kBitsPerKilobyte;
    spec.services.push_back(p);
    spec.requirements.push_back({mos_min, sinr_min});
  }
  return spec;
}

inline sdr::VideoProblemSpec video_spec(const sdr::LinkSpec& link, double sinr_min,
                                        double mos_min = 1.0) {
  sdr::VideoProblemSpec spec;
  spec.link = link;
  spec.requirements.assign(static_cast<std::size_t>(link.num_users()), {mos_min, sinr_min});
  return spec;
}

}  // namespace qoebf::testing
