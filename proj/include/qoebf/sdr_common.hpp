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

// Shared pieces of the relaxed web and video programs: the physical link
// description, the noise/power normalization, and the SPCA bookkeeping.
//
// Inside every program the channels and beamformers are rescaled so that
// the noise power is 1 and each BS's largest per-antenna cap is 1:
//   h~_{k,j} = h_{k,j} sqrt(P_j) / sigma_k,   W~_{k,j} = W_{k,j} / P_j,
// with P_j the largest cap at BS j. Then h~^H W~ h~ = h^H W h / sigma_k^2, so
// SINRs and rates are unchanged. The per-user scalars 1 + SINR and
// interference + 1 are further divided by c_k, the square root of user k's
// largest attainable SNR, so that both stay near 1 in the programs.

#include <cstdint>
#include <string>
#include <vector>

#include "qoebf/channel.hpp"
#include "qoebf/conic.hpp"
#include "qoebf/qoe.hpp"

namespace qoebf::sdr {

struct LinkSpec {
  channel::ChannelSet channels;
  std::vector<Eigen::VectorXd> power_caps;  // [bs][antenna], mW
  std::vector<double> noise;                // [user], mW

  int num_users() const { return channels.num_users(); }
  int num_bs() const { return channels.num_bs(); }
  void validate() const;
};

struct NormalizedLinks {
  std::vector<std::vector<ComplexVector>> h;  // [user][bs]
  std::vector<Eigen::VectorXd> caps;          // [bs][antenna], max entry 1
  std::vector<double> bs_scale;               // P_j
  std::vector<double> noise;                  // sigma_k^2
  std::vector<double> user_scale;             // c_k >= 1
};

NormalizedLinks normalize(const LinkSpec& link);

/// Lifted variables of one program, indexed [user][bs].
using BlockHandles = std::vector<std::vector<conic::PsdVar>>;

/// Adds one PSD block per (user, BS) named "W_k_j".
BlockHandles add_beam_blocks(conic::ConeProgram& program, const NormalizedLinks& links);

/// sum_j h~_{k,j}^H W~_{l,j} h~_{k,j}.
conic::AffineExpr received(const NormalizedLinks& links, const BlockHandles& W, int k, int l);

/// sum_{l != k} received(k, l).
conic::AffineExpr interference(const NormalizedLinks& links, const BlockHandles& W, int k);

/// Per-antenna caps "cap_j_q" summed over users, and SINR floors "floor_k"
/// (1 + 1/G) signal - sum_l received(k, l) >= 1 for every G_k > 0.
void add_power_and_floor_constraints(conic::ConeProgram& program, const NormalizedLinks& links,
                                     const BlockHandles& W, const std::vector<double>& floors);

/// With T = c t and S = c s: signal_k >= (lambda/2) T^2 + S^2 / (2 lambda) - S,
/// written as the rotated cone
/// ||(sqrt(lambda) t, s / sqrt(lambda))||^2 <= 2 (signal_k / c^2 + s / c) * 1.
void add_rate_bound(conic::ConeProgram& program, const conic::AffineExpr& signal,
                    conic::ScalarVar t, conic::ScalarVar s, double lambda, double scale,
                    const std::string& name);

/// interference_k + 1 <= c s.
void add_interference_bound(conic::ConeProgram& program, const NormalizedLinks& links,
                            const BlockHandles& W, int k, conic::ScalarVar s,
                            const std::string& name);

/// (lambda/2) t^2 + s^2 / (2 lambda) - t s; nonnegative, zero iff lambda = s / t.
double rate_bound_gap(double lambda, double t, double s);

/// Physical-unit matrices recovered from the solved normalized blocks.
qoe::LiftedBeamformers denormalize(const conic::ConicSolution& solution, const BlockHandles& W,
                                   const NormalizedLinks& links);

struct InitResult {
  bool feasible = false;
  std::vector<double> lambda;   // noise-normalized
  std::vector<double> sinr;     // SINR of the initial point
  double min_slack = 0.0;       // in units of noise power
  conic::SolveStatus status = conic::SolveStatus::kNumericalFailure;
};

/// Maximizes the smallest SINR-floor slack under the power caps. A point is
/// accepted when that slack exceeds 1e-6 noise powers; then t0 = 1 + SINR,
/// s0 = interference + 1 and lambda0 = s0 / t0.
InitResult init_lambda(const LinkSpec& link, const std::vector<double>& floors,
                       const conic::SolverOptions& options = {});

struct SpcaOptions {
  double epsilon = 1e-3;   // on max_k |lambda_new - lambda|, noise-normalized
  int max_iterations = 30;
  double rank_tolerance = 1e-4;
  int randomization_draws = 100;
  std::uint64_t randomization_seed = 0;
  conic::SolverOptions solver;
};

}  // namespace qoebf::sdr
