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

// From lifted SDR output to physical beamformers: rank-one extraction,
// randomized repair, constraint verification and per-user metrics.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoebf/qoe.hpp"
#include "qoebf/sdr_common.hpp"

namespace qoebf::solution {

enum class Status {
  kConverged,
  kIterationLimit,
  kSolverFailure,     // a later SPCA iterate failed; the best earlier one is kept
  kInfeasible,
  kExtractionFailed,  // no candidate beamformer honored every SINR floor
};

std::string to_string(Status status);

struct UserMetrics {
  double sinr = 0.0;
  double rate = 0.0;        // bit/s/Hz
  double mos_raw = 0.0;
  double mos_clipped = 1.0;
};

struct SpcaTrace {
  std::vector<double> objective;                 // aggregated MOS per iteration
  std::vector<std::vector<double>> lambda;       // lambda used by each iteration
  bool monotone = true;                          // within 1e-5 relative
  bool converged = false;
};

struct BeamformingSolution {
  Status status = Status::kInfeasible;
  qoe::LiftedBeamformers W;                      // mW
  qoe::Beamformers w;                            // sqrt(mW)
  std::vector<std::vector<double>> rank_quality; // lambda2 / lambda1 per block
  double worst_rank_quality = 0.0;
  bool fallback_used = false;
  std::vector<double> floors;                    // effective SINR floors
  std::vector<double> sdr_mos;                   // per-user MOS claimed by the relaxation
  std::vector<UserMetrics> users;                // from the extracted beamformers
  std::vector<Eigen::VectorXd> antenna_usage;    // [bs][antenna], mW
  SpcaTrace trace;
  int spca_iterations = 0;
  std::string message;

  bool has_beamformers() const { return !w.empty(); }
  double aggregated_mos(bool clipped) const;
};

struct Rank1 {
  ComplexVector w;
  double quality = 0.0;  // lambda2 / lambda1, 0 for the zero matrix
};

/// Blocks whose leading eigenvalue is at most zero_tol are treated as zero.
Rank1 extract_rank1(const HermitianMatrix& W, double zero_tol = 0.0);

/// Raw per-user MOS as a function of user index and rate.
using MosModel = std::function<double(int user, double rate)>;

MosModel web_mos_model(const std::vector<qoe::WebServiceParams>& services);
/// Below the validity range B R <= r the model is continued at its boundary
/// value g log10(u) + e.
MosModel video_mos_model(const qoe::VideoServiceParams& service);

void evaluate(BeamformingSolution& solution, const sdr::LinkSpec& link, const MosModel& mos);

/// Returns true when every antenna of every BS is within cap (1 + rel_tol).
bool caps_satisfied(const BeamformingSolution& solution, const sdr::LinkSpec& link,
                    double rel_tol = 1e-6);
/// Returns true when every user's SINR is at least floor (1 - rel_tol).
bool floors_satisfied(const BeamformingSolution& solution, double rel_tol = 1e-4);

/// Extracts w from W, keeping the principal eigenvectors when every block is
/// rank one within rank_tolerance and the result meets the floors. Otherwise
/// draws candidates from CN(0, W), scales each BS so its most loaded antenna
/// sits at its cap, and keeps the candidate with the largest aggregated raw
/// MOS that meets every floor. Sets status kExtractionFailed if none does.
void repair_feasibility(BeamformingSolution& solution, const sdr::LinkSpec& link,
                        const MosModel& mos, double rank_tolerance, int draws,
                        std::mt19937_64& rng);

struct SingleUserOptimum {
  ComplexVector w;
  double rate = 0.0;
};

/// max |h^H w| under |w_q|^2 <= P_q: w_q = sqrt(P_q) h_q / |h_q|.
SingleUserOptimum oracle_single_user(const ComplexVector& h, const Eigen::VectorXd& caps,
                                     double sigma2);

nlohmann::json to_json(const BeamformingSolution& solution);

}  // namespace qoebf::solution
