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

#include "qoebf/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qoebf::channel {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void Topology::validate() const {
  require(macro_min_radius > 0.0 && macro_min_radius < macro_radius, "macro annulus is empty");
  require(small_min_radius > 0.0 && small_min_radius < small_radius, "small-cell annulus is empty");
  require(num_small >= 0, "num_small must be >= 0");
  require(num_small == 0 || sbs_ring_radius + small_radius <= macro_radius,
          "small cells must lie inside the macro cell");
  require(M >= 1, "M must be >= 1");
  require(num_small == 0 || N >= 1, "N must be >= 1 when small cells exist");
  require(macro_users >= 0 && per_small_users >= 0, "user counts must be >= 0");
  require(num_users() >= 1, "topology has no users");
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::mt19937_64 RandomSource::stream(Purpose purpose, std::uint64_t a, std::uint64_t b) const {
  std::uint64_t h = splitmix64(seed_);
  for (const std::uint64_t word : {drop_, static_cast<std::uint64_t>(purpose), a, b}) {
    h = splitmix64(h ^ word);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

Complex standard_complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

double pathloss_db(double distance_km, Tier tier) {
  if (!(distance_km > 0.0)) throw std::invalid_argument("pathloss_db: distance must be positive");
  return tier == Tier::kMacro ? 148.1 + 37.6 * std::log10(distance_km)
                              : 127.0 + 30.0 * std::log10(distance_km);
}

Position uniform_in_annulus(const Position& center, double r0, double r1, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double radius = std::sqrt(r0 * r0 + u(rng) * (r1 * r1 - r0 * r0));
  const double angle = 2.0 * std::numbers::pi * u(rng);
  return {center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)};
}

UserPlacement drop_users(const Topology& topology, const RandomSource& random) {
  topology.validate();
  UserPlacement out;
  out.bs.push_back({0.0, 0.0});
  for (int j = 0; j < topology.num_small; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / topology.num_small;
    out.bs.push_back({topology.sbs_ring_radius * std::cos(angle),
                      topology.sbs_ring_radius * std::sin(angle)});
  }
  std::uint64_t k = 0;
  for (int i = 0; i < topology.macro_users; ++i, ++k) {
    auto rng = random.stream(RandomSource::Purpose::kPlacement, k);
    out.users.push_back(
        uniform_in_annulus(out.bs[0], topology.macro_min_radius, topology.macro_radius, rng));
    out.cell.push_back(0);
  }
  for (int j = 1; j <= topology.num_small; ++j) {
    for (int i = 0; i < topology.per_small_users; ++i, ++k) {
      auto rng = random.stream(RandomSource::Purpose::kPlacement, k);
      out.users.push_back(
          uniform_in_annulus(out.bs[j], topology.small_min_radius, topology.small_radius, rng));
      out.cell.push_back(j);
    }
  }
  return out;
}

void ChannelSet::validate() const {
  require(!h.empty(), "channel set has no users");
  require(gain.size() == h.size() && cell.size() == h.size(), "channel set size mismatch");
  for (std::size_t k = 0; k < h.size(); ++k) {
    require(h[k].size() == antennas.size() && gain[k].size() == antennas.size(),
            "channel set BS count mismatch");
    for (std::size_t j = 0; j < antennas.size(); ++j) {
      require(h[k][j].size() == antennas[j], "channel vector length does not match antenna count");
      require(h[k][j].allFinite(), "non-finite channel entry");
      require(gain[k][j] > 0.0, "large-scale gain must be positive");
    }
  }
}

ChannelSet generate_channels(const UserPlacement& placement, const Topology& topology,
                             double shadow_sigma_db, const RandomSource& random) {
  topology.validate();
  if (shadow_sigma_db < 0.0) throw std::invalid_argument("shadow_sigma_db must be >= 0");
  ChannelSet out;
  for (int j = 0; j < topology.num_bs(); ++j) out.antennas.push_back(topology.antennas(j));
  out.cell = placement.cell;
  const auto num_users = placement.users.size();
  out.h.resize(num_users);
  out.gain.resize(num_users);
  for (std::size_t k = 0; k < num_users; ++k) {
    for (int j = 0; j < topology.num_bs(); ++j) {
      auto rng = random.stream(RandomSource::Purpose::kChannel, k, static_cast<std::uint64_t>(j));
      const double d = distance(placement.users[k], placement.bs[j]);
      std::normal_distribution<double> shadow(0.0, 1.0);
      const double gain_db = -pathloss_db(d, j == 0 ? Tier::kMacro : Tier::kSmall) +
                             shadow_sigma_db * shadow(rng);
      const double gain = std::pow(10.0, gain_db / 10.0);
      ComplexVector h(topology.antennas(j));
      for (Eigen::Index q = 0; q < h.size(); ++q) h(q) = std::sqrt(gain) * standard_complex_normal(rng);
      out.h[k].push_back(std::move(h));
      out.gain[k].push_back(gain);
    }
  }
  return out;
}

ChannelSet without_small_cells(const ChannelSet& channels) {
  ChannelSet out;
  out.antennas = {channels.antennas.at(0)};
  out.cell = channels.cell;
  for (std::size_t k = 0; k < channels.h.size(); ++k) {
    out.h.push_back({channels.h[k].at(0)});
    out.gain.push_back({channels.gain[k].at(0)});
  }
  return out;
}

nlohmann::json to_json(const ChannelSet& channels) {
  nlohmann::json j;
  j["antennas"] = channels.antennas;
  j["cell"] = channels.cell;
  j["gain"] = channels.gain;
  nlohmann::json h = nlohmann::json::array();
  for (const auto& user : channels.h) {
    nlohmann::json per_bs = nlohmann::json::array();
    for (const auto& v : user) {
      nlohmann::json entries = nlohmann::json::array();
      for (Eigen::Index q = 0; q < v.size(); ++q) entries.push_back({v(q).real(), v(q).imag()});
      per_bs.push_back(std::move(entries));
    }
    h.push_back(std::move(per_bs));
  }
  j["h"] = std::move(h);
  return j;
}

ChannelSet channels_from_json(const nlohmann::json& j) {
  ChannelSet out;
  out.antennas = j.at("antennas").get<std::vector<int>>();
  out.cell = j.at("cell").get<std::vector<int>>();
  out.gain = j.at("gain").get<std::vector<std::vector<double>>>();
  for (const auto& user : j.at("h")) {
    std::vector<ComplexVector> per_bs;
    for (const auto& entries : user) {
      ComplexVector v(static_cast<Eigen::Index>(entries.size()));
      for (std::size_t q = 0; q < entries.size(); ++q) {
        v(static_cast<Eigen::Index>(q)) = {entries[q].at(0).get<double>(), entries[q].at(1).get<double>()};
      }
      per_bs.push_back(std::move(v));
    }
    out.h.push_back(std::move(per_bs));
  }
  out.validate();
  return out;
}

}  // namespace qoebf::channel
