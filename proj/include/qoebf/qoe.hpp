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

// MOS models for web browsing and video, their calibration, and the inverse
// maps from a minimum MOS to the SINR that guarantees it.
//
// Rates R are spectral efficiencies in bit/s/Hz; B * R is the bit rate.

#include <vector>

#include "qoebf/channel.hpp"
#include "qoebf/numerics.hpp"

namespace qoebf::qoe {

inline constexpr double kBitsPerKilobyte = 8000.0;

struct WebServiceParams {
  double K1 = 3.194;
  double K2 = 15.1978;
  double FS = 320 * kBitsPerKilobyte;   // bits
  double MSS = 1460 * 8.0;              // bits
  double RTT = 0.030;                   // s
  double B = 15000.0;                   // Hz

  void validate() const;
};

struct VideoServiceParams {
  double g = 27.37;
  double e = -39.43;
  double u = 28.046;
  double v = 0.038;
  double r = 5.024;   // bit/s
  double B = 15000.0;

  void validate() const;
};

/// mos_min <= 1 imposes no QoE floor; sinr_min is the QoS floor.
struct QoeRequirement {
  double mos_min = 1.0;
  double sinr_min = 0.0;
};

struct WebConstants {
  double K1 = 0.0;
  double K2 = 0.0;
};

/// MOS(R_min) = 1 and MOS(R_max) = 5 for a page of FS_avg bits.
WebConstants calibrate_web_constants(double r_min, double r_max, double fs_avg, double B);

/// K1 ln(B R / FS) + K2, unclipped.
double web_mos(double R, const WebServiceParams& p);

/// Page response time in seconds; the slow-start cycle count is clamped to
/// max(0, min(L1, L2)).
double page_delay(double R, const WebServiceParams& p);

/// -K1 ln(page_delay) + K2.
double web_mos_full(double R, const WebServiceParams& p);

/// u + v sqrt(B R / r) (1 - r / (B R)); requires B R > r.
double video_psnr(double R, const VideoServiceParams& p);

/// g log10(PSNR) + e, unclipped.
double video_mos(double R, const VideoServiceParams& p);

double clip_mos(double mos);

/// Linear SINR whose rate log2(1 + A) yields exactly mos_min. Throws
/// std::invalid_argument when the rate exponent exceeds 60 bit/s/Hz.
double web_sinr_threshold(double mos_min, const WebServiceParams& p);
double video_sinr_threshold(double mos_min, const VideoServiceParams& p);

/// max(sinr_min, A(mos_min)); A is skipped when mos_min <= 1.
double effective_sinr_floor(const QoeRequirement& req, const WebServiceParams& p);
double effective_sinr_floor(const QoeRequirement& req, const VideoServiceParams& p);

/// Beamformers indexed [user][bs]; lifted matrices likewise.
using Beamformers = std::vector<std::vector<ComplexVector>>;
using LiftedBeamformers = std::vector<std::vector<HermitianMatrix>>;

struct SinrTerms {
  double signal = 0.0;
  double interference = 0.0;
};

SinrTerms sinr_terms(int k, const channel::ChannelSet& channels, const Beamformers& w);
SinrTerms sinr_terms(int k, const channel::ChannelSet& channels, const LiftedBeamformers& W);

/// log2(1 + signal / (interference + sigma2)).
double spectral_efficiency(int k, const channel::ChannelSet& channels, const Beamformers& w,
                           double sigma2);
double spectral_efficiency(int k, const channel::ChannelSet& channels, const LiftedBeamformers& W,
                           double sigma2);

}  // namespace qoebf::qoe
