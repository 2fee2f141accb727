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

#include "spca_loop.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qoebf::sdr::detail {

solution::BeamformingSolution run_spca(const LinkSpec& link, const std::vector<double>& floors,
                                       const solution::MosModel& mos, const SpcaOptions& options,
                                       const IterateFn& iterate) {
  if (!(options.epsilon > 0.0) || options.max_iterations < 1) {
    throw std::invalid_argument("SPCA needs epsilon > 0 and max_iterations >= 1");
  }
  solution::BeamformingSolution out;
  out.floors = floors;

  const InitResult init = init_lambda(link, floors, options.solver);
  if (!init.feasible) {
    out.status = solution::Status::kInfeasible;
    out.message = "SINR floors unattainable under the power caps (init status " +
                  conic::to_string(init.status) + ")";
    return out;
  }

  std::vector<double> lambda = init.lambda;
  Iterate best;
  bool have_best = false;
  out.status = solution::Status::kIterationLimit;
  for (int n = 1; n <= options.max_iterations; ++n) {
    Iterate it = iterate(lambda);
    if (it.status != conic::SolveStatus::kOptimal) {
      out.status = solution::Status::kSolverFailure;
      out.message = "relaxed program at iteration " + std::to_string(n) + " returned " +
                    conic::to_string(it.status);
      break;
    }
    out.spca_iterations = n;
    if (!out.trace.objective.empty()) {
      const double prev = out.trace.objective.back();
      if (it.objective < prev - 1e-5 * std::max(1.0, std::abs(prev))) out.trace.monotone = false;
    }
    out.trace.objective.push_back(it.objective);
    out.trace.lambda.push_back(lambda);

    double change = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
      change = std::max(change, std::abs(it.next_lambda[k] - lambda[k]));
    }
    lambda = it.next_lambda;
    best = std::move(it);
    have_best = true;
    if (change <= options.epsilon) {
      out.status = solution::Status::kConverged;
      out.trace.converged = true;
      break;
    }
  }
  if (!have_best) return out;

  out.W = std::move(best.W);
  out.sdr_mos = std::move(best.sdr_mos);
  std::seed_seq seq{static_cast<std::uint32_t>(options.randomization_seed),
                    static_cast<std::uint32_t>(options.randomization_seed >> 32)};
  std::mt19937_64 rng(seq);
  solution::repair_feasibility(out, link, mos, options.rank_tolerance,
                               options.randomization_draws, rng);
  return out;
}

}  // namespace qoebf::sdr::detail
