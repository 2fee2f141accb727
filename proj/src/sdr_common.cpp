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

#include "qoebf/sdr_common.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qoebf::sdr {

using conic::AffineExpr;
using conic::ConeProgram;
using conic::Relation;

void LinkSpec::validate() const {
  channels.validate();
  if (static_cast<int>(power_caps.size()) != num_bs()) {
    throw std::invalid_argument("power caps must be given for every BS");
  }
  for (int j = 0; j < num_bs(); ++j) {
    if (power_caps[j].size() != channels.antennas[j]) {
      throw std::invalid_argument("power cap count does not match antenna count at BS " +
                                  std::to_string(j));
    }
    if (!(power_caps[j].array() > 0.0).all()) {
      throw std::invalid_argument("power caps must be positive");
    }
  }
  if (static_cast<int>(noise.size()) != num_users()) {
    throw std::invalid_argument("noise power must be given for every user");
  }
  for (double n : noise) {
    if (!(n > 0.0)) throw std::invalid_argument("noise power must be positive");
  }
}

NormalizedLinks normalize(const LinkSpec& link) {
  link.validate();
  NormalizedLinks out;
  out.noise = link.noise;
  for (int j = 0; j < link.num_bs(); ++j) {
    const double p = link.power_caps[j].maxCoeff();
    out.bs_scale.push_back(p);
    out.caps.push_back(link.power_caps[j] / p);
  }
  out.h.resize(link.num_users());
  for (int k = 0; k < link.num_users(); ++k) {
    const double sigma = std::sqrt(link.noise[k]);
    for (int j = 0; j < link.num_bs(); ++j) {
      out.h[k].push_back(link.channels.h[k][j] * (std::sqrt(out.bs_scale[j]) / sigma));
    }
    // (sum_j ||h~_kj|| sqrt(sum_q cap_jq))^2 bounds the received power.
    double amplitude = 0.0;
    for (int j = 0; j < link.num_bs(); ++j) {
      amplitude += out.h[k][j].norm() * std::sqrt(out.caps[j].sum());
    }
    out.user_scale.push_back(std::max(1.0, amplitude));
  }
  return out;
}

BlockHandles add_beam_blocks(ConeProgram& program, const NormalizedLinks& links) {
  BlockHandles W(links.h.size());
  for (std::size_t k = 0; k < links.h.size(); ++k) {
    for (std::size_t j = 0; j < links.caps.size(); ++j) {
      W[k].push_back(program.add_psd_block("W_" + std::to_string(k) + "_" + std::to_string(j),
                                           links.caps[j].size()));
    }
  }
  return W;
}

AffineExpr received(const NormalizedLinks& links, const BlockHandles& W, int k, int l) {
  AffineExpr e;
  for (std::size_t j = 0; j < links.caps.size(); ++j) e.add_quadratic(W[l][j], links.h[k][j]);
  return e;
}

AffineExpr interference(const NormalizedLinks& links, const BlockHandles& W, int k) {
  AffineExpr e;
  for (int l = 0; l < static_cast<int>(W.size()); ++l) {
    if (l != k) e += received(links, W, k, l);
  }
  return e;
}

void add_power_and_floor_constraints(ConeProgram& program, const NormalizedLinks& links,
                                     const BlockHandles& W, const std::vector<double>& floors) {
  const int K = static_cast<int>(W.size());
  if (static_cast<int>(floors.size()) != K) {
    throw std::invalid_argument("one SINR floor per user is required");
  }
  for (std::size_t j = 0; j < links.caps.size(); ++j) {
    const Eigen::Index n = links.caps[j].size();
    for (Eigen::Index q = 0; q < n; ++q) {
      AffineExpr usage;
      for (int k = 0; k < K; ++k) usage.add_diagonal(W[k][j], q, n);
      program.add_linear(usage, Relation::kLessEqual, links.caps[j](q),
                         "cap_" + std::to_string(j) + "_" + std::to_string(q));
    }
  }
  for (int k = 0; k < K; ++k) {
    if (floors[k] < 0.0 || !std::isfinite(floors[k])) {
      throw std::invalid_argument("SINR floor must be finite and >= 0");
    }
    if (floors[k] == 0.0) continue;
    AffineExpr lhs = received(links, W, k, k) * (1.0 + 1.0 / floors[k]);
    for (int l = 0; l < K; ++l) lhs -= received(links, W, k, l);
    program.add_linear(lhs, Relation::kGreaterEqual, 1.0, "floor_" + std::to_string(k));
  }
}

void add_rate_bound(ConeProgram& program, const AffineExpr& signal, conic::ScalarVar t,
                    conic::ScalarVar s, double lambda, double scale, const std::string& name) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  const double root = std::sqrt(lambda);
  program.add_rotated_soc(signal * (1.0 / (scale * scale)) + AffineExpr(s, 1.0 / scale), 1.0,
                          {AffineExpr(t, root), AffineExpr(s, 1.0 / root)}, name);
}

void add_interference_bound(ConeProgram& program, const NormalizedLinks& links,
                            const BlockHandles& W, int k, conic::ScalarVar s,
                            const std::string& name) {
  const double c = links.user_scale[k];
  program.add_linear(interference(links, W, k) * (1.0 / c) - AffineExpr(s),
                     Relation::kLessEqual, -1.0 / c, name);
}

double rate_bound_gap(double lambda, double t, double s) {
  // (sqrt(lambda) t - s / sqrt(lambda))^2 / 2, exact up to rounding.
  const double d = std::sqrt(lambda) * t - s / std::sqrt(lambda);
  return 0.5 * d * d;
}

qoe::LiftedBeamformers denormalize(const conic::ConicSolution& solution, const BlockHandles& W,
                                   const NormalizedLinks& links) {
  qoe::LiftedBeamformers out(W.size());
  for (std::size_t k = 0; k < W.size(); ++k) {
    for (std::size_t j = 0; j < W[k].size(); ++j) {
      out[k].push_back(solution.value(W[k][j]) * links.bs_scale[j]);
    }
  }
  return out;
}

InitResult init_lambda(const LinkSpec& link, const std::vector<double>& floors,
                       const conic::SolverOptions& options) {
  const NormalizedLinks links = normalize(link);
  const int K = link.num_users();
  if (static_cast<int>(floors.size()) != K) {
    throw std::invalid_argument("one SINR floor per user is required");
  }
  ConeProgram program;
  const BlockHandles W = add_beam_blocks(program, links);
  // Only the sign of the optimal slack matters, so tau is kept >= -1.
  const conic::ScalarVar tau = program.add_scalar("tau", -1.0);
  add_power_and_floor_constraints(program, links, W, std::vector<double>(K, 0.0));
  for (int k = 0; k < K; ++k) {
    AffineExpr slack = received(links, W, k, k) - floors[k] * interference(links, W, k);
    slack.add_constant(-floors[k]);
    program.add_linear(slack - AffineExpr(tau), Relation::kGreaterEqual, 0.0,
                       "slack_" + std::to_string(k));
  }
  program.maximize(AffineExpr(tau));

  InitResult out;
  const conic::ConicSolution sol = conic::solve(program, options);
  out.status = sol.status;
  if (!sol.optimal()) return out;
  out.min_slack = sol.value(tau);
  if (!(out.min_slack > 1e-6)) return out;
  out.feasible = true;
  for (int k = 0; k < K; ++k) {
    const double signal = conic::evaluate(received(links, W, k, k), sol);
    const double interf = conic::evaluate(interference(links, W, k), sol);
    const double s0 = interf + 1.0;
    const double sinr = signal / s0;
    out.sinr.push_back(sinr);
    out.lambda.push_back(s0 / (1.0 + sinr));
  }
  return out;
}

}  // namespace qoebf::sdr
