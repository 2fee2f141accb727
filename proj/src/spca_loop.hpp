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

// Algorithm-independent part of the SPCA iteration shared by both services.

#include <functional>
#include <vector>

#include "qoebf/sdr_common.hpp"
#include "qoebf/solution.hpp"

namespace qoebf::sdr::detail {

struct Iterate {
  conic::SolveStatus status = conic::SolveStatus::kNumericalFailure;
  double objective = 0.0;            // aggregated MOS claimed by the relaxation
  std::vector<double> sdr_mos;       // per user
  std::vector<double> next_lambda;   // s* / t* per user
  qoe::LiftedBeamformers W;          // physical units
};

using IterateFn = std::function<Iterate(const std::vector<double>& lambda)>;

solution::BeamformingSolution run_spca(const LinkSpec& link, const std::vector<double>& floors,
                                       const solution::MosModel& mos, const SpcaOptions& options,
                                       const IterateFn& iterate);

}  // namespace qoebf::sdr::detail
