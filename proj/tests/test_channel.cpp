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

#include <cmath>

#include "qoebf/channel.hpp"

namespace qoebf::channel {
namespace {

TEST(Pathloss, Examples) {
  EXPECT_NEAR(pathloss_db(0.25, Tier::kMacro), 148.1 + 37.6 * std::log10(0.25), 1e-12);
  EXPECT_NEAR(pathloss_db(0.25, Tier::kMacro), 125.4625, 1e-3);
  EXPECT_NEAR(pathloss_db(0.04, Tier::kSmall), 85.062, 1e-3);
  EXPECT_DOUBLE_EQ(pathloss_db(1.0, Tier::kMacro), 148.1);
  EXPECT_THROW(pathloss_db(0.0, Tier::kMacro), std::invalid_argument);
  EXPECT_THROW(pathloss_db(-1.0, Tier::kSmall), std::invalid_argument);
}

TEST(Topology, Invariants) {
  Topology t;
  EXPECT_NO_THROW(t.validate());
  t.sbs_ring_radius = 0.47;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = Topology{};
  t.N = 0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t.num_small = 0;
  EXPECT_NO_THROW(t.validate());
}

TEST(DropUsers, MacroAnnulusMeanRadius) {
  // E[r] = (2/3)(r1^3 - r0^3) / (r1^2 - r0^2) for area-uniform sampling.
  const double r0 = 0.035, r1 = 0.5;
  const double analytic = 2.0 / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0) / (r1 * r1 - r0 * r0);
  EXPECT_NEAR(analytic, 0.33486, 1e-4);
  std::mt19937_64 rng(1234);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Position p = uniform_in_annulus({0.0, 0.0}, r0, r1, rng);
    const double r = std::hypot(p.x, p.y);
    ASSERT_GE(r, r0 - 1e-12);
    ASSERT_LE(r, r1 + 1e-12);
    sum += r;
  }
  EXPECT_NEAR(sum / n, analytic, 0.01 * analytic);
}

TEST(DropUsers, PlacementInvariantsAndDeterminism) {
  Topology t;
  for (std::uint64_t drop = 0; drop < 50; ++drop) {
    const RandomSource random(9, drop);
    const UserPlacement a = drop_users(t, random);
    const UserPlacement b = drop_users(t, random);
    ASSERT_EQ(a.users.size(), 10u);
    for (std::size_t k = 0; k < a.users.size(); ++k) {
      EXPECT_EQ(a.users[k].x, b.users[k].x);
      EXPECT_EQ(a.users[k].y, b.users[k].y);
      const int cell = a.cell[k];
      const double r = distance(a.users[k], a.bs[static_cast<std::size_t>(cell)]);
      if (k < 6) {
        EXPECT_EQ(cell, 0);
        EXPECT_GE(r, 0.035);
        EXPECT_LE(r, 0.5);
      } else {
        EXPECT_EQ(cell, static_cast<int>(k) - 5);
        EXPECT_GE(r, 0.003);
        EXPECT_LE(r, 0.04);
      }
    }
  }
  // SBSs equally spaced on the ring.
  const UserPlacement p = drop_users(t, RandomSource(1, 0));
  for (int j = 1; j <= 4; ++j) EXPECT_NEAR(distance(p.bs[0], p.bs[static_cast<std::size_t>(j)]), 0.25, 1e-12);
  EXPECT_NEAR(distance(p.bs[1], p.bs[2]), 0.25 * std::sqrt(2.0), 1e-12);
}

TEST(DropUsers, NoSmallCellsNoSmallCellUsers) {
  Topology t;
  t.num_small = 0;
  const UserPlacement p = drop_users(t, RandomSource(3, 0));
  EXPECT_EQ(p.users.size(), 6u);
  EXPECT_EQ(p.bs.size(), 1u);
}

TEST(StandardComplexNormal, Moments) {
  std::mt19937_64 rng(77);
  const int n = 100000;
  double re2 = 0.0, im2 = 0.0, abs2 = 0.0, mean_re = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex z = standard_complex_normal(rng);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    abs2 += std::norm(z);
    mean_re += z.real();
  }
  EXPECT_NEAR(abs2 / n, 1.0, 0.02);
  EXPECT_NEAR(re2 / n, 0.5, 0.01);
  EXPECT_NEAR(im2 / n, 0.5, 0.01);
  EXPECT_NEAR(mean_re / n, 0.0, 0.01);
}

TEST(GenerateChannels, MeanPowerMatchesPathloss) {
  // One macro user at a fixed distance, no shadowing: E||h||^2 / M = 10^(-PL/10).
  Topology t;
  t.num_small = 0;
  t.macro_users = 1;
  t.M = 16;
  UserPlacement placement;
  placement.bs = {{0.0, 0.0}};
  placement.users = {{0.2, 0.0}};
  placement.cell = {0};
  const double expected = std::pow(10.0, -pathloss_db(0.2, Tier::kMacro) / 10.0);
  double sum = 0.0;
  const int drops = 5000;
  for (int d = 0; d < drops; ++d) {
    const ChannelSet c = generate_channels(placement, t, 0.0, RandomSource(5, static_cast<std::uint64_t>(d)));
    EXPECT_DOUBLE_EQ(c.gain[0][0], expected);
    sum += c.h[0][0].squaredNorm() / t.M;
  }
  EXPECT_NEAR(sum / drops / expected, 1.0, 0.02);
}

TEST(GenerateChannels, DimensionsGainsAndDeterminism) {
  Topology t;
  t.M = 8;
  t.N = 3;
  const RandomSource random(42, 7);
  const UserPlacement p = drop_users(t, random);
  const ChannelSet a = generate_channels(p, t, 7.0, random);
  const ChannelSet b = generate_channels(p, t, 7.0, random);
  ASSERT_EQ(a.num_users(), 10);
  ASSERT_EQ(a.num_bs(), 5);
  for (int k = 0; k < a.num_users(); ++k) {
    for (int j = 0; j < a.num_bs(); ++j) {
      EXPECT_EQ(a.h[k][j].size(), j == 0 ? 8 : 3);
      EXPECT_GT(a.gain[k][j], 0.0);
      EXPECT_LE(a.gain[k][j], 1.0);
      EXPECT_TRUE(a.h[k][j] == b.h[k][j]);
    }
  }
}

TEST(GenerateChannels, AddingAntennasKeepsExistingDraws) {
  Topology t;
  t.M = 4;
  const RandomSource random(42, 1);
  const UserPlacement p = drop_users(t, random);
  const ChannelSet small = generate_channels(p, t, 7.0, random);
  t.M = 8;
  const ChannelSet large = generate_channels(p, t, 7.0, random);
  for (int k = 0; k < small.num_users(); ++k) {
    EXPECT_TRUE(large.h[k][0].head(4) == small.h[k][0]);
  }
}

TEST(GenerateChannels, GainDecreasesWithDistanceWithoutShadowing) {
  Topology t;
  t.num_small = 0;
  t.macro_users = 3;
  UserPlacement placement;
  placement.bs = {{0.0, 0.0}};
  placement.users = {{0.05, 0.0}, {0.0, 0.2}, {-0.45, 0.0}};
  placement.cell = {0, 0, 0};
  const ChannelSet c = generate_channels(placement, t, 0.0, RandomSource(1, 0));
  EXPECT_GT(c.gain[0][0], c.gain[1][0]);
  EXPECT_GT(c.gain[1][0], c.gain[2][0]);
}

TEST(WithoutSmallCells, KeepsUsersDropsSmallCells) {
  Topology t;
  const RandomSource random(2, 0);
  const ChannelSet c = generate_channels(drop_users(t, random), t, 7.0, random);
  const ChannelSet h = without_small_cells(c);
  EXPECT_EQ(h.num_bs(), 1);
  ASSERT_EQ(h.num_users(), c.num_users());
  for (int k = 0; k < c.num_users(); ++k) EXPECT_TRUE(h.h[k][0] == c.h[k][0]);
}

TEST(ChannelJson, RoundTripIsExact) {
  Topology t;
  t.M = 4;
  t.N = 2;
  const RandomSource random(8, 3);
  const ChannelSet c = generate_channels(drop_users(t, random), t, 7.0, random);
  const ChannelSet back = channels_from_json(nlohmann::json::parse(to_json(c).dump()));
  ASSERT_EQ(back.num_users(), c.num_users());
  for (int k = 0; k < c.num_users(); ++k) {
    for (int j = 0; j < c.num_bs(); ++j) {
      EXPECT_TRUE(back.h[k][j] == c.h[k][j]);
      EXPECT_EQ(back.gain[k][j], c.gain[k][j]);
    }
  }
}

}  // namespace
}  // namespace qoebf::channel
