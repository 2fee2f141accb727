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
#include <random>

#include "instances.hpp"
#include "qoebf/solution.hpp"

namespace qoebf::solution {
namespace {

const Complex I(0.0, 1.0);

// One BS with two antennas and two users on orthogonal channels.
sdr::LinkSpec orthogonal_link() {
  sdr::LinkSpec link;
  link.channels.antennas = {2};
  link.channels.cell = {0};
  link.channels.gain = {{1.0}, {1.0}};
  ComplexVector h0(2), h1(2);
  h0 << 1.0, 0.0;
  h1 << 0.0, 1.0;
  link.channels.h = {{h0}, {h1}};
  link.power_caps = {Eigen::VectorXd::Ones(2)};
  link.noise = {0.1, 0.1};
  return link;
}

MosModel web_model(int users) {
  return web_mos_model(std::vector<qoe::WebServiceParams>(static_cast<std::size_t>(users)));
}

TEST(ExtractRank1, RecoversVectorUpToPhase) {
  ComplexVector w0(2);
  w0 << 1.0, 2.0 * I;
  const Rank1 r = extract_rank1(HermitianMatrix::Outer(w0));
  EXPECT_NEAR(r.quality, 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r.w.dot(w0)), w0.squaredNorm(), 1e-12);
  EXPECT_TRUE(HermitianMatrix::Outer(r.w).dense().isApprox(HermitianMatrix::Outer(w0).dense(), 1e-12));
}

TEST(ExtractRank1, IdentityAndZero) {
  EXPECT_NEAR(extract_rank1(HermitianMatrix::Identity(2)).quality, 1.0, 1e-12);
  const Rank1 z = extract_rank1(HermitianMatrix::Zero(3));
  EXPECT_EQ(z.quality, 0.0);
  EXPECT_EQ(z.w.size(), 3);
  EXPECT_EQ(z.w.squaredNorm(), 0.0);
}

TEST(ExtractRank1, QualityIsEigenvalueRatio) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    ComplexVector a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a(i) = channel::standard_complex_normal(rng);
      b(i) = channel::standard_complex_normal(rng);
    }
    const HermitianMatrix W = HermitianMatrix::Outer(a) + HermitianMatrix::Outer(b);
    const Eigen::VectorXd ev = hermitian_eigenvalues(W);  // ascending
    EXPECT_NEAR(extract_rank1(W).quality, ev(1) / ev(2), 1e-10);
  }
}

TEST(Oracle, Examples) {
  ComplexVector h(2);
  h << 1.0, 1.0;
  EXPECT_NEAR(oracle_single_user(h, Eigen::VectorXd::Ones(2), 1.0).rate, std::log2(5.0), 1e-12);
  h << 1.0, 0.0;
  const SingleUserOptimum o = oracle_single_user(h, Eigen::VectorXd::Ones(2), 1.0);
  EXPECT_NEAR(o.rate, 1.0, 1e-12);
  EXPECT_EQ(o.w(1), Complex(0.0));
  EXPECT_THROW(oracle_single_user(h, Eigen::VectorXd::Ones(3), 1.0), std::invalid_argument);
  EXPECT_THROW(oracle_single_user(h, Eigen::VectorXd::Ones(2), 0.0), std::invalid_argument);
}

TEST(Oracle, PhaseInvariantAndDominatesRandomFeasibleBeams) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int M = 2 + trial % 3;
    ComplexVector h(M);
    Eigen::VectorXd caps(M);
    for (int q = 0; q < M; ++q) {
      h(q) = channel::standard_complex_normal(rng);
      caps(q) = 0.1 + u(rng);
    }
    const SingleUserOptimum o = oracle_single_user(h, caps, 0.3);
    EXPECT_NEAR(oracle_single_user(h * std::polar(1.0, 2.0 * trial), caps, 0.3).rate, o.rate, 1e-12);
    EXPECT_NEAR(std::log2(1 + std::norm(h.dot(o.w)) / 0.3), o.rate, 1e-12);
    for (int s = 0; s < 20; ++s) {
      ComplexVector w(M);
      for (int q = 0; q < M; ++q) w(q) = std::polar(std::sqrt(caps(q) * u(rng)), 6.3 * u(rng));
      EXPECT_LE(std::log2(1 + std::norm(h.dot(w)) / 0.3), o.rate + 1e-12);
    }
  }
}

TEST(Evaluate, ZeroBeamformersClipToOne) {
  const sdr::LinkSpec link = orthogonal_link();
  BeamformingSolution s;
  s.w = {{ComplexVector::Zero(2)}, {ComplexVector::Zero(2)}};
  evaluate(s, link, web_model(2));
  for (const auto& u : s.users) {
    EXPECT_EQ(u.rate, 0.0);
    EXPECT_EQ(u.mos_clipped, 1.0);
  }
  s.w.pop_back();
  EXPECT_THROW(evaluate(s, link, web_model(2)), std::invalid_argument);
}

TEST(Evaluate, OracleBeamComposesWithMos) {
  std::mt19937_64 rng(3);
  const sdr::LinkSpec link = qoebf::testing::single_user_link(3, 0.5, 0.2, rng);
  const SingleUserOptimum o = oracle_single_user(link.channels.h[0][0], link.power_caps[0], 0.2);
  BeamformingSolution s;
  s.w = {{o.w}};
  evaluate(s, link, web_model(1));
  EXPECT_NEAR(s.users[0].rate, o.rate, 1e-12);
  EXPECT_NEAR(s.users[0].mos_raw, qoe::web_mos(o.rate, qoe::WebServiceParams{}), 1e-12);
}

TEST(Evaluate, GlobalPhaseInvariance) {
  const sdr::LinkSpec link = qoebf::testing::drop_link(2, 1, 4, 2, 5);
  std::mt19937_64 rng(8);
  BeamformingSolution a;
  a.w.resize(3);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < link.num_bs(); ++j) {
      ComplexVector v(link.channels.antennas[j]);
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 0.01 * channel::standard_complex_normal(rng);
      a.w[k].push_back(v);
    }
  }
  BeamformingSolution b = a;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < link.num_bs(); ++j) b.w[k][j] *= std::polar(1.0, 0.4 * k + 1.1 * j);
  }
  evaluate(a, link, web_model(3));
  evaluate(b, link, web_model(3));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(a.users[k].sinr, b.users[k].sinr, 1e-12 * a.users[k].sinr);
}

TEST(CapsSatisfied, ToleranceContract) {
  const sdr::LinkSpec link = orthogonal_link();
  BeamformingSolution s;
  ComplexVector w(2);
  w << std::sqrt(1 + 1e-7), 0.0;
  s.w = {{w}, {ComplexVector::Zero(2)}};
  evaluate(s, link, web_model(2));
  EXPECT_TRUE(caps_satisfied(s, link));
  s.w[0][0](0) = std::sqrt(1 + 1e-5);
  evaluate(s, link, web_model(2));
  EXPECT_FALSE(caps_satisfied(s, link));
}

TEST(Repair, RankOnePassesThroughUnscaled) {
  const sdr::LinkSpec link = orthogonal_link();
  ComplexVector w0(2), w1(2);
  w0 << 0.5, 0.0;
  w1 << 0.0, 0.3 * I;
  BeamformingSolution s;
  s.W = {{HermitianMatrix::Outer(w0)}, {HermitianMatrix::Outer(w1)}};
  s.floors = {1.0, 0.5};
  std::mt19937_64 rng(1);
  repair_feasibility(s, link, web_model(2), 1e-4, 100, rng);
  EXPECT_FALSE(s.fallback_used);
  EXPECT_NE(s.status, Status::kExtractionFailed);
  EXPECT_NEAR(s.antenna_usage[0](0), 0.25, 1e-12);
  EXPECT_NEAR(s.antenna_usage[0](1), 0.09, 1e-12);
}

TEST(Repair, SmallSecondEigenvalueStillPassesThrough) {
  const sdr::LinkSpec link = orthogonal_link();
  Eigen::VectorXd d(2);
  d << 0.5, 0.5 * 5e-5;
  BeamformingSolution s;
  s.W = {{HermitianMatrix::Diagonal(d)}, {HermitianMatrix::Zero(2)}};
  s.floors = {1.0, 0.0};
  std::mt19937_64 rng(1);
  repair_feasibility(s, link, web_model(2), 1e-4, 100, rng);
  EXPECT_FALSE(s.fallback_used);
  EXPECT_NEAR(s.worst_rank_quality, 5e-5, 1e-12);
  EXPECT_NEAR(s.antenna_usage[0](0), 0.5, 1e-12);
}

TEST(Repair, RankTwoFixtureYieldsFeasibleCandidate) {
  // User 0 spreads power over both antennas; its principal vector alone
  // meets every floor once scaled to the caps, so a candidate must exist.
  const sdr::LinkSpec link = orthogonal_link();
  Eigen::VectorXd d(2);
  d << 0.6, 0.3;
  BeamformingSolution s;
  s.W = {{HermitianMatrix::Diagonal(d)}, {HermitianMatrix::Zero(2)}};
  s.floors = {5.0, 0.0};
  std::mt19937_64 rng(7);
  repair_feasibility(s, link, web_model(2), 1e-4, 100, rng);
  EXPECT_TRUE(s.fallback_used);
  EXPECT_NEAR(s.worst_rank_quality, 0.5, 1e-12);
  EXPECT_NE(s.status, Status::kExtractionFailed);
  EXPECT_TRUE(caps_satisfied(s, link));
  EXPECT_TRUE(floors_satisfied(s));
}

TEST(Repair, ImpossibleFloorsAreReportedNotHidden) {
  const sdr::LinkSpec link = orthogonal_link();
  BeamformingSolution s;
  s.W = {{HermitianMatrix::Identity(2)}, {HermitianMatrix::Identity(2)}};
  s.floors = {1e6, 1e6};
  s.status = Status::kConverged;
  std::mt19937_64 rng(7);
  repair_feasibility(s, link, web_model(2), 1e-4, 20, rng);
  EXPECT_TRUE(s.fallback_used);
  EXPECT_EQ(s.status, Status::kExtractionFailed);
  EXPECT_FALSE(s.message.empty());
}

TEST(Repair, DeterministicGivenRng) {
  const sdr::LinkSpec link = qoebf::testing::drop_link(2, 1, 3, 2, 4);
  std::mt19937_64 gen(3);
  BeamformingSolution s;
  s.W.resize(3);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < link.num_bs(); ++j) {
      HermitianMatrix W = HermitianMatrix::Zero(link.channels.antennas[j]);
      for (int r = 0; r < 2; ++r) {
        ComplexVector v(link.channels.antennas[j]);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          v(i) = 0.2 * std::sqrt(link.power_caps[j](i)) * channel::standard_complex_normal(gen);
        }
        W += HermitianMatrix::Outer(v);
      }
      s.W[k].push_back(W);
    }
  }
  s.floors = {0.5, 0.5, 0.5};
  BeamformingSolution t = s;
  std::mt19937_64 r1(99), r2(99);
  repair_feasibility(s, link, web_model(3), 1e-4, 50, r1);
  repair_feasibility(t, link, web_model(3), 1e-4, 50, r2);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < link.num_bs(); ++j) EXPECT_TRUE(s.w[k][j] == t.w[k][j]);
  }
}

TEST(Json, CarriesMetrics) {
  const sdr::LinkSpec link = orthogonal_link();
  BeamformingSolution s;
  ComplexVector w(2);
  w << 0.5, 0.0;
  s.w = {{w}, {ComplexVector::Zero(2)}};
  s.floors = {0.0, 0.0};
  evaluate(s, link, web_model(2));
  const nlohmann::json j = to_json(s);
  EXPECT_EQ(j.at("status"), "infeasible");
  EXPECT_TRUE(j.contains("users"));
  EXPECT_TRUE(j.contains("antenna_usage_mw"));
  EXPECT_TRUE(j.contains("beamformers"));
  EXPECT_EQ(j.at("users").size(), 2u);
}

}  // namespace
}  // namespace qoebf::solution
