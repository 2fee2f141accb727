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

// Relaxed web-browsing program and its SPCA loop.

#include <vector>

#include "qoebf/conic.hpp"
#include "qoebf/qoe.hpp"
#include "qoebf/sdr_common.hpp"
#include "qoebf/solution.hpp"

namespace qoebf::sdr {

struct WebProblemSpec {
  LinkSpec link;
  std::vector<qoe::WebServiceParams> services;    // per user; FS differs
  std::vector<qoe::QoeRequirement> requirements;  // per user

  void validate() const;
  /// max(sinr_min, A(mos_min)) per user.
  std::vector<double> floors() const;
};

/// Program variables per user: z (B R / FS), t ((1 + SINR) / c), s (interference
/// plus noise, over c) and the epigraph ell <= ln z. The objective is
/// sum_k K1_k ell_k; the constant K2_k is added back when reporting.
struct WebProgram {
  conic::ConeProgram program;
  NormalizedLinks links;
  BlockHandles W;
  std::vector<conic::ScalarVar> z, t, s, ell;
};

/// lambda is in noise-normalized units (s / t with unit noise).
WebProgram build_relaxed_web(const WebProblemSpec& spec, const std::vector<double>& lambda);

solution::BeamformingSolution spca_solve_web(const WebProblemSpec& spec,
                                             const SpcaOptions& options = {});

}  // namespace qoebf::sdr
