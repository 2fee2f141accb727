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

#include "qoebf/sdr_video.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spca_loop.hpp"

namespace qoebf::sdr {

using conic::AffineExpr;
using conic::Relation;

void VideoProblemSpec::validate() const {
  link.validate();
  service.validate();
  if (requirements.size() != static_cast<std::size_t>(link.num_users())) {
    throw std::invalid_argument("video spec needs one requirement per user");
  }
}

std::vector<double> VideoProblemSpec::floors() const {
  std::vector<double> out;
  for (const auto& req : requirements) out.push_back(qoe::effective_sinr_floor(req, service));
  return out;
}

namespace {

VideoProgram build(const VideoProblemSpec& spec, const std::vector<double>& lambda,
                   const std::vector<double>& floors) {
  spec.validate();
  const int K = spec.link.num_users();
  if (static_cast<int>(lambda.size()) != K) throw std::invalid_argument("one lambda per user");
  const auto& v = spec.service;
  const double root_r = std::sqrt(v.r);

  VideoProgram out;
  out.links = normalize(spec.link);
  out.W = add_beam_blocks(out.program, out.links);
  AffineExpr objective;
  for (int k = 0; k < K; ++k) {
    const std::string id = std::to_string(k);
    auto& prog = out.program;
    out.z.push_back(prog.add_scalar("z_" + id));
    out.t1.push_back(prog.add_scalar("t1_" + id, root_r + 1e-9));
    out.t2.push_back(prog.add_scalar("t2_" + id));
    out.s.push_back(prog.add_scalar("s_" + id));
    out.p.push_back(prog.add_scalar("p_" + id, 0.0));
    out.q.push_back(prog.add_scalar("q_" + id));
    out.ell.push_back(prog.add_scalar("ell_" + id));
    const AffineExpr z(out.z[k]), t1(out.t1[k]), t2(out.t2[k]), s(out.s[k]), p(out.p[k]),
        q(out.q[k]);

    prog.add_exp(AffineExpr(out.ell[k]), 1.0, z, "epi_" + id);
    // p t1 >= r.
    prog.add_rotated_soc(p, t1, {AffineExpr(std::sqrt(2.0 * v.r))}, "hyper_" + id);
    // t1 - p >= (z - u) sqrt(r) / v.
    prog.add_linear(t1 - p - (z - AffineExpr(v.u)) * (root_r / v.v), Relation::kGreaterEqual, 0.0,
                    "psnr_" + id);
    // q <= B log2(c t2).
    const double c = out.links.user_scale[k];
    AffineExpr exponent = q * (std::numbers::ln2 / v.B);
    exponent.add_constant(-std::log(c));
    prog.add_exp(exponent, 1.0, t2, "rate_" + id);
    // t1^2 <= q.
    prog.add_rotated_soc(q, 0.5, {t1}, "square_" + id);
    add_rate_bound(prog, received(out.links, out.W, k, k), out.t2[k], out.s[k], lambda[k], c,
                   "bound_" + id);
    add_interference_bound(prog, out.links, out.W, k, out.s[k], "interf_" + id);
    objective += AffineExpr(out.ell[k], v.g / std::numbers::ln10);
  }
  add_power_and_floor_constraints(out.program, out.links, out.W, floors);
  out.program.maximize(objective);
  return out;
}

}  // namespace

VideoProgram build_relaxed_video(const VideoProblemSpec& spec, const std::vector<double>& lambda) {
  return build(spec, lambda, spec.floors());
}

solution::BeamformingSolution spca_solve_video(const VideoProblemSpec& spec,
                                               const SpcaOptions& options) {
  spec.validate();
  const std::vector<double> floors = spec.floors();
  // The previous optimum stays strictly feasible when lambda moves to s / t,
  // so each relaxed program starts from it.
  conic::ConicSolution previous;
  const auto iterate = [&](const std::vector<double>& lambda) {
    const VideoProgram prog = build(spec, lambda, floors);
    const conic::ConicSolution sol = conic::solve(prog.program, options.solver, previous);
    detail::Iterate it;
    it.status = sol.status;
    if (!sol.optimal()) return it;
    previous = sol;
    for (std::size_t k = 0; k < spec.requirements.size(); ++k) {
      const double mos = spec.service.g * std::log10(sol.value(prog.z[k])) + spec.service.e;
      it.sdr_mos.push_back(mos);
      it.objective += mos;
      it.next_lambda.push_back(sol.value(prog.s[k]) / sol.value(prog.t2[k]));
    }
    it.W = denormalize(sol, prog.W, prog.links);
    return it;
  };
  return detail::run_spca(spec.link, floors, solution::video_mos_model(spec.service), options,
                          iterate);
}

}  // namespace qoebf::sdr
