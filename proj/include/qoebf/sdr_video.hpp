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

// Relaxed video program and its SPCA loop.

#include <vector>

#include "qoebf/conic.hpp"
#include "qoebf/qoe.hpp"
#include "qoebf/sdr_common.hpp"
#include "qoebf/solution.hpp"

namespace qoebf::sdr {

struct VideoProblemSpec {
  LinkSpec link;
  qoe::VideoServiceParams service;                // shared by all users
  std::vector<qoe::QoeRequirement> requirements;  // per user

  void validate() const;
  std::vector<double> floors() const;
};

/// Variable chain per user: z <= PSNR, t1 = sqrt(B R), q >= t1^2,
/// t2 = (1 + SINR) / c with B log2(c t2) >= q, s for interference plus noise
/// over c, and
/// p with p t1 >= r splitting t1 - r / t1 >= (z - u) sqrt(r) / v. ell <= ln z
/// carries the objective sum_k (g / ln 10) ell_k; e is added back when
/// reporting.
struct VideoProgram {
  conic::ConeProgram program;
  NormalizedLinks links;
  BlockHandles W;
  std::vector<conic::ScalarVar> z, t1, t2, s, p, q, ell;
};

VideoProgram build_relaxed_video(const VideoProblemSpec& spec, const std::vector<double>& lambda);

solution::BeamformingSolution spca_solve_video(const VideoProblemSpec& spec,
                                               const SpcaOptions& options = {});

}  // namespace qoebf::sdr
