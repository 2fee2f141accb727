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

// Two-tier network geometry and channel generation. BS 0 is the macro cell
// at the origin; BSs 1..N_s are small cells equally spaced on a ring.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoebf/numerics.hpp"

namespace qoebf::channel {

enum class Tier { kMacro, kSmall };

struct Topology {
  double macro_radius = 0.5;        // km
  double macro_min_radius = 0.035;  // km
  double small_radius = 0.04;       // km
  double small_min_radius = 0.003;  // km
  double sbs_ring_radius = 0.25;    // km
  int num_small = 4;
  int M = 80;
  int N = 1;
  int macro_users = 6;
  int per_small_users = 1;

  int num_users() const { return macro_users + num_small * per_small_users; }
  int num_bs() const { return 1 + num_small; }
  int antennas(int bs) const { return bs == 0 ? M : N; }
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct Position {
  double x = 0.0;  // km
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

struct UserPlacement {
  std::vector<Position> bs;     // bs[0] is the macro site
  std::vector<Position> users;
  std::vector<int> cell;        // 0 for macro-area users, j >= 1 for small cell j
};

/// Deterministic random substreams. Every (purpose, a, b) triple of a drop
/// gets an independent generator, so adding antennas or cells never shifts
/// the draws of existing ones.
class RandomSource {
 public:
  enum class Purpose : std::uint64_t { kPlacement = 1, kChannel = 2, kRandomization = 3 };

  RandomSource(std::uint64_t seed, std::uint64_t drop) : seed_(seed), drop_(drop) {}
  std::mt19937_64 stream(Purpose purpose, std::uint64_t a = 0, std::uint64_t b = 0) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t drop() const { return drop_; }

 private:
  std::uint64_t seed_;
  std::uint64_t drop_;
};

/// Standard circularly-symmetric complex Gaussian: Re and Im ~ N(0, 1/2).
Complex standard_complex_normal(std::mt19937_64& rng);

double pathloss_db(double distance_km, Tier tier);

/// Radius drawn as sqrt(r0^2 + u (r1^2 - r0^2)), angle uniform.
Position uniform_in_annulus(const Position& center, double r0, double r1, std::mt19937_64& rng);

/// Macro users first, then per_small_users users per small cell in cell order.
UserPlacement drop_users(const Topology& topology, const RandomSource& random);

struct ChannelSet {
  std::vector<int> antennas;                       // per BS
  std::vector<std::vector<ComplexVector>> h;       // [user][bs]
  std::vector<std::vector<double>> gain;           // large-scale power gain, linear
  std::vector<int> cell;                           // serving area per user

  int num_users() const { return static_cast<int>(h.size()); }
  int num_bs() const { return static_cast<int>(antennas.size()); }
  void validate() const;
};

/// gain_dB = -pathloss + N(0, shadow_sigma_db^2); h = sqrt(gain) g with g
/// i.i.d. standard complex Gaussian. Each (user, BS) pair draws its
/// shadowing first and then its antenna entries from its own substream.
ChannelSet generate_channels(const UserPlacement& placement, const Topology& topology,
                             double shadow_sigma_db, const RandomSource& random);

/// Same users, macro BS only.
ChannelSet without_small_cells(const ChannelSet& channels);

nlohmann::json to_json(const ChannelSet& channels);
ChannelSet channels_from_json(const nlohmann::json& j);

}  // namespace qoebf::channel
