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

#include "qoebf/solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qoebf/channel.hpp"

namespace qoebf::solution {
namespace {

// Blocks whose leading eigenvalue is below this fraction of the BS's largest
// cap carry no beam worth classifying and are excluded from the rank
// statistic. The interior-point solution leaves every eigenvalue of an
// optimally empty block near 1e-6 of the cap, so the cut sits two decades
// above that floor.
constexpr double kZeroBlockFraction = 1e-4;

std::vector<Eigen::VectorXd> usage_of(const qoe::Beamformers& w, int num_bs,
                                      const std::vector<int>& antennas) {
  std::vector<Eigen::VectorXd> usage;
  for (int j = 0; j < num_bs; ++j) usage.push_back(Eigen::VectorXd::Zero(antennas[j]));
  for (const auto& per_bs : w) {
    for (int j = 0; j < num_bs; ++j) usage[j] += per_bs[j].cwiseAbs2();
  }
  return usage;
}

// Scales each BS so that its most loaded antenna sits exactly at its cap.
void scale_to_caps(qoe::Beamformers& w, const sdr::LinkSpec& link) {
  const auto usage = usage_of(w, link.num_bs(), link.channels.antennas);
  for (int j = 0; j < link.num_bs(); ++j) {
    double factor = std::numeric_limits<double>::infinity();
    for (Eigen::Index q = 0; q < usage[j].size(); ++q) {
      if (usage[j](q) > 0.0) factor = std::min(factor, link.power_caps[j](q) / usage[j](q));
    }
    if (!std::isfinite(factor)) continue;
    for (auto& per_bs : w) per_bs[j] *= std::sqrt(factor);
  }
}

struct Candidate {
  qoe::Beamformers w;
  double score = -std::numeric_limits<double>::infinity();
  bool feasible = false;
};

Candidate assess(qoe::Beamformers w, const BeamformingSolution& base, const sdr::LinkSpec& link,
                 const MosModel& mos) {
  BeamformingSolution trial;
  trial.w = std::move(w);
  trial.floors = base.floors;
  evaluate(trial, link, mos);
  Candidate c;
  c.feasible = caps_satisfied(trial, link) && floors_satisfied(trial);
  c.score = trial.aggregated_mos(false);
  c.w = std::move(trial.w);
  return c;
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::kConverged: return "converged";
    case Status::kIterationLimit: return "iteration_limit";
    case Status::kSolverFailure: return "solver_failure";
    case Status::kInfeasible: return "infeasible";
    case Status::kExtractionFailed: return "extraction_failed";
  }
  return "unknown";
}

double BeamformingSolution::aggregated_mos(bool clipped) const {
  double total = 0.0;
  for (const auto& u : users) total += clipped ? u.mos_clipped : u.mos_raw;
  return total;
}

Rank1 extract_rank1(const HermitianMatrix& W, double zero_tol) {
  Rank1 out;
  const LeadingEigenpair pair = leading_eigenpair(W);
  if (pair.value <= std::max(0.0, zero_tol)) {
    out.w = ComplexVector::Zero(W.dim());
    out.quality = 0.0;
    return out;
  }
  out.w = std::sqrt(pair.value) * pair.vector;
  out.quality = std::max(0.0, pair.second) / pair.value;
  return out;
}

MosModel web_mos_model(const std::vector<qoe::WebServiceParams>& services) {
  return [services](int user, double rate) {
    const auto& p = services.at(static_cast<std::size_t>(user));
    if (!(rate > 0.0)) return -std::numeric_limits<double>::infinity();
    return qoe::web_mos(rate, p);
  };
}

MosModel video_mos_model(const qoe::VideoServiceParams& service) {
  return [service](int, double rate) {
    if (!(service.B * rate > service.r)) return service.g * std::log10(service.u) + service.e;
    return qoe::video_mos(rate, service);
  };
}

void evaluate(BeamformingSolution& solution, const sdr::LinkSpec& link, const MosModel& mos) {
  const int K = link.num_users();
  if (static_cast<int>(solution.w.size()) != K) {
    throw std::invalid_argument("evaluate: beamformer count does not match user count");
  }
  solution.users.assign(K, {});
  for (int k = 0; k < K; ++k) {
    const qoe::SinrTerms terms = qoe::sinr_terms(k, link.channels, solution.w);
    UserMetrics& u = solution.users[k];
    u.sinr = terms.signal / (terms.interference + link.noise[k]);
    u.rate = std::log2(1.0 + u.sinr);
    u.mos_raw = mos(k, u.rate);
    u.mos_clipped = qoe::clip_mos(u.mos_raw);
  }
  solution.antenna_usage = usage_of(solution.w, link.num_bs(), link.channels.antennas);
}

bool caps_satisfied(const BeamformingSolution& solution, const sdr::LinkSpec& link,
                    double rel_tol) {
  if (solution.antenna_usage.size() != link.power_caps.size()) return false;
  for (std::size_t j = 0; j < link.power_caps.size(); ++j) {
    if ((solution.antenna_usage[j].array() > link.power_caps[j].array() * (1.0 + rel_tol)).any()) {
      return false;
    }
  }
  return true;
}

bool floors_satisfied(const BeamformingSolution& solution, double rel_tol) {
  if (solution.users.size() != solution.floors.size()) return false;
  for (std::size_t k = 0; k < solution.users.size(); ++k) {
    if (solution.users[k].sinr < solution.floors[k] * (1.0 - rel_tol)) return false;
  }
  return true;
}

void repair_feasibility(BeamformingSolution& solution, const sdr::LinkSpec& link,
                        const MosModel& mos, double rank_tolerance, int draws,
                        std::mt19937_64& rng) {
  const int K = link.num_users();
  const int J = link.num_bs();
  if (static_cast<int>(solution.W.size()) != K) {
    throw std::invalid_argument("repair_feasibility: lifted solution missing");
  }
  if (solution.floors.empty()) solution.floors.assign(K, 0.0);

  qoe::Beamformers principal(K);
  solution.rank_quality.assign(K, std::vector<double>(J, 0.0));
  solution.worst_rank_quality = 0.0;
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < J; ++j) {
      const double zero_tol = kZeroBlockFraction * link.power_caps[j].maxCoeff();
      const Rank1 r = extract_rank1(solution.W[k][j], zero_tol);
      const bool negligible = r.w.squaredNorm() == 0.0;
      principal[k].push_back(negligible ? extract_rank1(solution.W[k][j]).w : r.w);
      solution.rank_quality[k][j] = r.quality;
      solution.worst_rank_quality = std::max(solution.worst_rank_quality, r.quality);
    }
  }

  Candidate best = assess(principal, solution, link, mos);
  solution.fallback_used = false;
  if (solution.worst_rank_quality <= rank_tolerance && best.feasible) {
    solution.w = std::move(best.w);
    evaluate(solution, link, mos);
    return;
  }

  solution.fallback_used = true;
  auto consider = [&](Candidate c) {
    if (!c.feasible) return;
    if (!best.feasible || c.score > best.score) best = std::move(c);
  };
  {
    qoe::Beamformers scaled = principal;
    scale_to_caps(scaled, link);
    consider(assess(std::move(scaled), solution, link, mos));
  }

  // Square roots of every lifted block for CN(0, W) sampling.
  std::vector<std::vector<Eigen::MatrixXcd>> roots(K);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < J; ++j) {
      const HermitianEigen eig = hermitian_eigen(solution.W[k][j]);
      const Eigen::VectorXd d = eig.values.cwiseMax(0.0).cwiseSqrt();
      roots[k].push_back(eig.vectors * d.cast<Complex>().asDiagonal());
    }
  }
  for (int draw = 0; draw < draws; ++draw) {
    qoe::Beamformers w(K);
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < J; ++j) {
        ComplexVector xi(roots[k][j].cols());
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = channel::standard_complex_normal(rng);
        w[k].push_back(roots[k][j] * xi);
      }
    }
    scale_to_caps(w, link);
    consider(assess(std::move(w), solution, link, mos));
  }

  solution.w = std::move(best.w);
  evaluate(solution, link, mos);
  if (!best.feasible) {
    solution.status = Status::kExtractionFailed;
    solution.message = "no extracted or randomized beamformer met every SINR floor";
  }
}

SingleUserOptimum oracle_single_user(const ComplexVector& h, const Eigen::VectorXd& caps,
                                     double sigma2) {
  if (h.size() != caps.size()) throw std::invalid_argument("oracle: cap count mismatch");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("oracle: noise power must be positive");
  SingleUserOptimum out;
  out.w = ComplexVector::Zero(h.size());
  double amplitude = 0.0;
  for (Eigen::Index q = 0; q < h.size(); ++q) {
    const double mag = std::abs(h(q));
    if (mag == 0.0) continue;
    out.w(q) = std::sqrt(caps(q)) * h(q) / mag;
    amplitude += std::sqrt(caps(q)) * mag;
  }
  out.rate = std::log2(1.0 + amplitude * amplitude / sigma2);
  return out;
}

nlohmann::json to_json(const BeamformingSolution& solution) {
  nlohmann::json j;
  j["status"] = to_string(solution.status);
  j["spca_iterations"] = solution.spca_iterations;
  j["fallback_used"] = solution.fallback_used;
  j["worst_rank_quality"] = solution.worst_rank_quality;
  j["rank_quality"] = solution.rank_quality;
  j["floors"] = solution.floors;
  j["sdr_mos"] = solution.sdr_mos;
  if (!solution.message.empty()) j["message"] = solution.message;
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : solution.users) {
    users.push_back({{"sinr", u.sinr},
                     {"rate_bps_hz", u.rate},
                     {"mos_raw", u.mos_raw},
                     {"mos_clipped", u.mos_clipped}});
  }
  j["users"] = std::move(users);
  nlohmann::json usage = nlohmann::json::array();
  for (const auto& u : solution.antenna_usage) {
    usage.push_back(std::vector<double>(u.data(), u.data() + u.size()));
  }
  j["antenna_usage_mw"] = std::move(usage);
  nlohmann::json beams = nlohmann::json::array();
  for (const auto& per_bs : solution.w) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& v : per_bs) {
      nlohmann::json entries = nlohmann::json::array();
      for (Eigen::Index q = 0; q < v.size(); ++q) entries.push_back({v(q).real(), v(q).imag()});
      row.push_back(std::move(entries));
    }
    beams.push_back(std::move(row));
  }
  j["beamformers"] = std::move(beams);
  j["trace"] = {{"objective", solution.trace.objective},
                {"lambda", solution.trace.lambda},
                {"monotone", solution.trace.monotone},
                {"converged", solution.trace.converged}};
  return j;
}

}  // namespace qoebf::solution
