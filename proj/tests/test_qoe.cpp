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

#include "qoebf/channel.hpp"
#include "qoebf/qoe.hpp"

namespace qoebf::qoe {
namespace {

WebServiceParams calibrated(double fs_kb) {
  const WebConstants c = calibrate_web_constants(2.0, 7.0, 320 * kBitsPerKilobyte, 15000.0);
  WebServiceParams p;
  p.K1 = c.K1;
  p.K2 = c.K2;
  p.FS = fs_kb * kBitsPerKilobyte;
  return p;
}

TEST(Calibration, ClosedFormAgainstIndependentEvaluation) {
  const WebConstants c = calibrate_web_constants(2.0, 7.0, 2560000.0, 15000.0);
  // Independent oracle: solve the two endpoint equations as a 2x2 linear system.
  Eigen::Matrix2d a;
  a << std::log(15000.0 * 2.0 / 2560000.0), 1.0, std::log(15000.0 * 7.0 / 2560000.0), 1.0;
  const Eigen::Vector2d k = a.colPivHouseholderQr().solve(Eigen::Vector2d(1.0, 5.0));
  EXPECT_NEAR(c.K1, k(0), 1e-12);
  EXPECT_NEAR(c.K2, k(1), 1e-12);
  EXPECT_NEAR(c.K2, 15.1978, 1e-3);
}

TEST(Calibration, KilobyteConvention) {
  const WebConstants dec = calibrate_web_constants(2.0, 7.0, 320 * 8000.0, 15000.0);
  const WebConstants bin = calibrate_web_constants(2.0, 7.0, 320 * 8192.0, 15000.0);
  EXPECT_NEAR(dec.K2, 15.1978, 5e-4);
  EXPECT_GT(std::abs(bin.K2 - 15.1978), 5e-2);
}

TEST(Calibration, EndpointsForAnyInputs) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double lo = u(rng), hi = lo + u(rng), fs = 1e4 * u(rng), B = 1e3 * u(rng);
    const WebConstants c = calibrate_web_constants(lo, hi, fs, B);
    WebServiceParams p;
    p.K1 = c.K1;
    p.K2 = c.K2;
    p.FS = fs;
    p.B = B;
    EXPECT_NEAR(web_mos(lo, p), 1.0, 1e-9);
    EXPECT_NEAR(web_mos(hi, p), 5.0, 1e-9);
  }
  EXPECT_THROW(calibrate_web_constants(2.0, 2.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(calibrate_web_constants(0.0, 2.0, 1.0, 1.0), std::invalid_argument);
}

TEST(WebMos, DefaultConstantsEndpoints) {
  const WebServiceParams p;  // rounded default K1, K2, FS = 320 kB
  EXPECT_NEAR(web_mos(7.0, p), 5.0, 0.01);
  EXPECT_NEAR(web_mos(2.0, p), 1.0, 0.01);
  EXPECT_THROW(web_mos(0.0, p), std::invalid_argument);
}

TEST(WebMos, DoublingPageSizeCostsK1Ln2) {
  WebServiceParams p;
  const double before = web_mos(3.3, p);
  p.FS *= 2;
  EXPECT_NEAR(before - web_mos(3.3, p), p.K1 * std::log(2.0), 1e-12);
}

TEST(PageDelay, Examples) {
  WebServiceParams p;
  EXPECT_NEAR(page_delay(2.0, p), 0.09 + 2560000.0 / 30000.0, 1e-9);
  EXPECT_NEAR(page_delay(2.0, p), 85.423, 1e-3);
  p.RTT = 0.0;
  for (double R : {0.5, 2.0, 7.0, 20.0}) EXPECT_NEAR(page_delay(R, p), p.FS / (p.B * R), 1e-9);
}

TEST(PageDelay, DecreasingInRate) {
  for (double fs : {18.0, 320.0, 1000.0}) {
    WebServiceParams p;
    p.FS = fs * kBitsPerKilobyte;
    p.B = 1e6;  // exercises positive slow-start counts
    double prev = page_delay(0.01, p);
    for (double R = 0.02; R < 50.0; R *= 1.1) {
      const double d = page_delay(R, p);
      EXPECT_LT(d, prev) << "R=" << R;
      prev = d;
    }
  }
}

TEST(VideoMos, PsnrEndpoints) {
  const VideoServiceParams p;
  EXPECT_NEAR(p.g * std::log10(30.0) + p.e, 1.0, 0.01);
  EXPECT_NEAR(p.g * std::log10(42.0) + p.e, 5.0, 0.01);
}

TEST(VideoMos, DirectEvaluation) {
  const VideoServiceParams p;
  const double br = 15000.0 * 7.0;
  EXPECT_NEAR(video_psnr(7.0, p), 28.046 + 0.038 * std::sqrt(br / 5.024) * (1 - 5.024 / br), 1e-12);
  EXPECT_NEAR(video_psnr(7.0, p), 33.54, 0.01);
  EXPECT_NEAR(video_mos(7.0, p), 2.32, 0.01);
  EXPECT_THROW(video_psnr(5.024 / 15000.0, p), std::invalid_argument);
}

TEST(VideoMos, IncreasingInRate) {
  const VideoServiceParams p;
  double prev = video_mos(p.r / p.B * 1.001, p);
  for (double R = p.r / p.B * 1.01; R < 40.0; R *= 1.05) {
    const double m = video_mos(R, p);
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(WebThreshold, Examples) {
  const WebServiceParams p;
  EXPECT_NEAR(web_sinr_threshold(1.0, p), 3.0, 0.01);
  // The rounded default K1, K2 put MOS 5 at R = 7.007 rather than 7.
  EXPECT_NEAR(web_sinr_threshold(5.0, p), 127.625, 1e-3);
  EXPECT_NEAR(web_sinr_threshold(5.0, calibrated(320)), 127.0, 1e-9);
  EXPECT_NEAR(web_sinr_threshold(1.0, calibrated(320)), 3.0, 1e-12);
  EXPECT_NEAR(web_mos(std::log2(1 + web_sinr_threshold(2.37, p)), p), 2.37, 1e-9);
}

TEST(WebThreshold, RoundTripAndMonotone) {
  for (double fs : {18.0, 50.0, 320.0, 1000.0}) {
    const WebServiceParams p = calibrated(fs);
    double prev = 0.0;
    for (double m = 1.0; m <= 5.0 + 1e-12; m += 0.05) {
      const double a = web_sinr_threshold(m, p);
      EXPECT_NEAR(web_mos(std::log2(1 + a), p), m, 1e-9);
      EXPECT_GT(a, prev);
      prev = a;
    }
  }
  for (double m : {1.0, 2.5, 4.0}) {
    EXPECT_LT(web_sinr_threshold(m, calibrated(50)), web_sinr_threshold(m, calibrated(320)));
    EXPECT_LT(web_sinr_threshold(m, calibrated(320)), web_sinr_threshold(m, calibrated(1000)));
  }
}

TEST(WebThreshold, OverflowGuard) {
  WebServiceParams p;
  p.FS = 1e12;
  EXPECT_THROW(web_sinr_threshold(5.0, p), std::invalid_argument);
}

// Independent oracle: bisection on video_mos(R) = target.
double video_rate_by_bisection(double target, const VideoServiceParams& p) {
  double lo = p.r / p.B * (1 + 1e-12), hi = 200.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (video_mos(mid, p) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(VideoThreshold, MatchesBisectionOracle) {
  const VideoServiceParams p;
  const double a = video_sinr_threshold(2.5, p);
  EXPECT_NEAR(std::log2(1 + a), 8.3297, 1e-4);
  EXPECT_NEAR(a, 320.73, 1e-2);
  for (double m = 1.0; m <= 4.0 + 1e-12; m += 0.5) {
    const double R = video_rate_by_bisection(m, p);
    EXPECT_NEAR(std::log2(1 + video_sinr_threshold(m, p)), R, 1e-9 * std::max(1.0, R));
    EXPECT_NEAR(video_mos(std::log2(1 + video_sinr_threshold(m, p)), p), m, 1e-6);
  }
}

TEST(VideoThreshold, InverseConsistency) {
  const VideoServiceParams p;
  for (double R : {1.0, 3.0, 6.5, 9.0}) {
    EXPECT_NEAR(video_sinr_threshold(video_mos(R, p), p), std::exp2(R) - 1, 1e-8 * std::exp2(R));
  }
}

TEST(EffectiveFloor, MaxOfQosAndQoe) {
  const WebServiceParams p;
  EXPECT_DOUBLE_EQ(effective_sinr_floor({1.0, 0.5}, p), 0.5);
  EXPECT_DOUBLE_EQ(effective_sinr_floor({3.0, 0.5}, p), web_sinr_threshold(3.0, p));
  EXPECT_DOUBLE_EQ(effective_sinr_floor({3.0, 1e6}, p), 1e6);
  const VideoServiceParams v;
  EXPECT_DOUBLE_EQ(effective_sinr_floor({2.5, 3.0}, v), video_sinr_threshold(2.5, v));
}

channel::ChannelSet two_user_set(std::mt19937_64& rng) {
  channel::ChannelSet c;
  c.antennas = {3, 2};
  c.cell = {0, 1};
  c.gain = {{1.0, 1.0}, {1.0, 1.0}};
  c.h.resize(2);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      ComplexVector h(c.antennas[j]);
      for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = channel::standard_complex_normal(rng);
      c.h[k].push_back(h);
    }
  }
  return c;
}

Beamformers random_beams(const channel::ChannelSet& c, std::mt19937_64& rng) {
  Beamformers w(2);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      ComplexVector v(c.antennas[j]);
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = channel::standard_complex_normal(rng);
      w[k].push_back(v);
    }
  }
  return w;
}

TEST(SpectralEfficiency, Examples) {
  channel::ChannelSet c;
  c.antennas = {2};
  c.cell = {0};
  c.gain = {{1.0}};
  ComplexVector h(2);
  h << 1.0, 0.0;
  c.h = {{h}};
  EXPECT_NEAR(spectral_efficiency(0, c, Beamformers{{h}}, 1.0), 1.0, 1e-15);
  EXPECT_EQ(spectral_efficiency(0, c, Beamformers{{ComplexVector::Zero(2)}}, 1.0), 0.0);
}

TEST(SpectralEfficiency, LiftedMatchesVectorAndPhaseInvariant) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const channel::ChannelSet c = two_user_set(rng);
    Beamformers w = random_beams(c, rng);
    LiftedBeamformers W(2);
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 2; ++j) W[k].push_back(HermitianMatrix::Outer(w[k][j]));
    }
    for (int k = 0; k < 2; ++k) {
      const double r = spectral_efficiency(k, c, w, 0.3);
      EXPECT_NEAR(spectral_efficiency(k, c, W, 0.3), r, 1e-12);
      Beamformers rotated = w;
      rotated[1][0] *= std::polar(1.0, 0.7 * trial);
      rotated[0][1] *= std::polar(1.0, -1.3);
      EXPECT_NEAR(spectral_efficiency(k, c, rotated, 0.3), r, 1e-12);
    }
  }
}

}  // namespace
}  // namespace qoebf::qoe
