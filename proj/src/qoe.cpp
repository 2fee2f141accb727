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

#include "qoebf/qoe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qoebf::qoe {
namespace {

constexpr double kMaxRateExponent = 60.0;

void require_rate(double R, const char* who) {
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw std::invalid_argument(std::string(who) + ": rate must be positive and finite");
  }
}

double threshold_from_rate(double rate) {
  if (!(rate <= kMaxRateExponent)) {
    throw std::invalid_argument("MOS requirement needs " + std::to_string(rate) +
                                " bit/s/Hz, beyond the supported range");
  }
  return std::exp2(rate) - 1.0;
}

template <typename Matrixish>
double received_power(const ComplexVector& h, const Matrixish& w);

template <>
double received_power(const ComplexVector& h, const ComplexVector& w) {
  if (h.size() != w.size()) throw std::invalid_argument("beamformer length mismatch");
  return std::norm(h.dot(w));
}

template <>
double received_power(const ComplexVector& h, const HermitianMatrix& w) {
  return quadratic_form(h, w);
}

template <typename Beams>
SinrTerms sinr_terms_impl(int k, const channel::ChannelSet& channels, const Beams& w) {
  if (k < 0 || k >= channels.num_users()) throw std::invalid_argument("user index out of range");
  if (static_cast<int>(w.size()) != channels.num_users()) {
    throw std::invalid_argument("beamformer user count does not match channel set");
  }
  SinrTerms out;
  for (int l = 0; l < channels.num_users(); ++l) {
    if (static_cast<int>(w[l].size()) != channels.num_bs()) {
      throw std::invalid_argument("beamformer BS count does not match channel set");
    }
    for (int j = 0; j < channels.num_bs(); ++j) {
      const double p = received_power(channels.h[k][j], w[l][j]);
      (l == k ? out.signal : out.interference) += p;
    }
  }
  return out;
}

double rate_from_terms(const SinrTerms& t, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("noise power must be positive");
  return std::log2(1.0 + std::max(0.0, t.signal) / (std::max(0.0, t.interference) + sigma2));
}

}  // namespace

void WebServiceParams::validate() const {
  if (!(K1 > 0.0) || !(FS > 0.0) || !(B > 0.0) || !(MSS > 0.0) || RTT < 0.0) {
    throw std::invalid_argument("invalid web service parameters");
  }
}

void VideoServiceParams::validate() const {
  if (!(g > 0.0) || !(v > 0.0) || !(r > 0.0) || !(B > 0.0)) {
    throw std::invalid_argument("invalid video service parameters");
  }
}

WebConstants calibrate_web_constants(double r_min, double r_max, double fs_avg, double B) {
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("calibration requires 0 < R_min < R_max");
  }
  if (!(fs_avg > 0.0) || !(B > 0.0)) throw std::invalid_argument("FS and B must be positive");
  WebConstants c;
  c.K1 = 4.0 / std::log(r_max / r_min);
  c.K2 = 5.0 - c.K1 * std::log(B * r_max / fs_avg);
  return c;
}

double web_mos(double R, const WebServiceParams& p) {
  require_rate(R, "web_mos");
  return p.K1 * std::log(p.B * R / p.FS) + p.K2;
}

double page_delay(double R, const WebServiceParams& p) {
  require_rate(R, "page_delay");
  const double br = p.B * R;
  const double l1 = std::log2(0.5 + br * p.RTT / (2.0 * p.MSS));
  const double l2 = std::log2(0.5 + p.FS / (4.0 * p.MSS));
  const double L = std::max(0.0, std::min(l1, l2));
  return 3.0 * p.RTT + p.FS / br + L * (p.MSS / br + p.RTT) -
         2.0 * p.MSS * (std::exp2(L) - 1.0) / br;
}

double web_mos_full(double R, const WebServiceParams& p) {
  return -p.K1 * std::log(page_delay(R, p)) + p.K2;
}

double video_psnr(double R, const VideoServiceParams& p) {
  require_rate(R, "video_psnr");
  const double br = p.B * R;
  if (!(br > p.r)) throw std::invalid_argument("video_psnr: bit rate must exceed r");
  return p.u + p.v * std::sqrt(br / p.r) * (1.0 - p.r / br);
}

double video_mos(double R, const VideoServiceParams& p) {
  return p.g * std::log10(video_psnr(R, p)) + p.e;
}

double clip_mos(double mos) { return std::clamp(mos, 1.0, 5.0); }

double web_sinr_threshold(double mos_min, const WebServiceParams& p) {
  p.validate();
  return threshold_from_rate(p.FS / p.B * std::exp((mos_min - p.K2) / p.K1));
}

double video_sinr_threshold(double mos_min, const VideoServiceParams& p) {
  p.validate();
  // With y = sqrt(B R): v / sqrt(r) (y - r / y) = X, a quadratic in y.
  const double x = std::pow(10.0, (mos_min - p.e) / p.g) - p.u;
  const double a = std::sqrt(p.r) * x / p.v;
  const double y = 0.5 * (a + std::sqrt(a * a + 4.0 * p.r));
  return threshold_from_rate(y * y / p.B);
}

double effective_sinr_floor(const QoeRequirement& req, const WebServiceParams& p) {
  const double a = req.mos_min > 1.0 ? web_sinr_threshold(req.mos_min, p) : 0.0;
  return std::max(req.sinr_min, a);
}

double effective_sinr_floor(const QoeRequirement& req, const VideoServiceParams& p) {
  const double a = req.mos_min > 1.0 ? video_sinr_threshold(req.mos_min, p) : 0.0;
  return std::max(req.sinr_min, a);
}

SinrTerms sinr_terms(int k, const channel::ChannelSet& channels, const Beamformers& w) {
  return sinr_terms_impl(k, channels, w);
}

SinrTerms sinr_terms(int k, const channel::ChannelSet& channels, const LiftedBeamformers& W) {
  return sinr_terms_impl(k, channels, W);
}

double spectral_efficiency(int k, const channel::ChannelSet& channels, const Beamformers& w,
                           double sigma2) {
  return rate_from_terms(sinr_terms(k, channels, w), sigma2);
}

double spectral_efficiency(int k, const channel::ChannelSet& channels, const LiftedBeamformers& W,
                           double sigma2) {
  return rate_from_terms(sinr_terms(k, channels, W), sigma2);
}

}  // namespace qoebf::qoe
