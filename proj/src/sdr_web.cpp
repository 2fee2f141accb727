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

#include "qoebf/sdr_web.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spca_loop.hpp"

namespace qoebf::sdr {

using conic::AffineExpr;

void WebProblemSpec::validate() const {
  link.validate();
  const auto K = static_cast<std::size_t>(link.num_users());
  if (services.size() != K || requirements.size() != K) {
    throw std::invalid_argument("web spec needs one service profile and requirement per user");
  }
  for (const auto& p : services) p.validate();
}

std::vector<double> WebProblemSpec::floors() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < services.size(); ++k) {
    out.push_back(qoe::effective_sinr_floor(requirements[k], services[k]));
  }
  return out;
}

namespace {

WebProgram build(const WebProblemSpec& spec, const std::vector<double>& lambda,
                 const std::vector<double>& floors) {
  spec.validate();
  const int K = spec.link.num_users();
  if (static_cast<int>(lambda.size()) != K) throw std::invalid_argument("one lambda per user");

  WebProgram out;
  out.links = normalize(spec.link);
  out.W = add_beam_blocks(out.program, out.links);
  AffineExpr objective;
  for (int k = 0; k < K; ++k) {
    const std::string id = std::to_string(k);
    const auto& p = spec.services[k];
    out.z.push_back(out.program.add_scalar("z_" + id));
    out.t.push_back(out.program.add_scalar("t_" + id));
    out.s.push_back(out.program.add_scalar("s_" + id));
    out.ell.push_back(out.program.add_scalar("ell_" + id));

    out.program.add_exp(AffineExpr(out.ell[k]), 1.0, AffineExpr(out.z[k]), "epi_" + id);
    // log2(c t) >= z FS / B.
    const double c = out.links.user_scale[k];
    AffineExpr exponent(out.z[k], p.FS * std::numbers::ln2 / p.B);
    exponent.add_constant(-std::log(c));
    out.program.add_exp(exponent, 1.0, AffineExpr(out.t[k]), "rate_" + id);
    add_rate_bound(out.program, received(out.links, out.W, k, k), out.t[k], out.s[k], lambda[k], c,
                   "bound_" + id);
    add_interference_bound(out.program, out.links, out.W, k, out.s[k], "interf_" + id);
    objective += AffineExpr(out.ell[k], p.K1);
  }
  add_power_and_floor_constraints(out.program, out.links, out.W, floors);
  out.program.maximize(objective);
  return out;
}

}  // namespace

WebProgram build_relaxed_web(const WebProblemSpec& spec, const std::vector<double>& lambda) {
  return build(spec, lambda, spec.floors());
}

solution::BeamformingSolution spca_solve_web(const WebProblemSpec& spec,
                                             const SpcaOptions& options) {
  spec.validate();
  const std::vector<double> floors = spec.floors();
  // The previous optimum stays strictly feasible when lambda moves to s / t,
  // so each relaxed program starts from it.
  conic::ConicSolution previous;
  const auto iterate = [&](const std::vector<double>& lambda) {
    const WebProgram prog = build(spec, lambda, floors);
    const conic::ConicSolution sol = conic::solve(prog.program, options.solver, previous);
    detail::Iterate it;
    it.status = sol.status;
    if (!sol.optimal()) return it;
    previous = sol;
    it.objective = 0.0;
    for (std::size_t k = 0; k < spec.services.size(); ++k) {
      const auto& p = spec.services[k];
      const double mos = p.K1 * std::log(sol.value(prog.z[k])) + p.K2;
      it.sdr_mos.push_back(mos);
      it.objective += mos;
      it.next_lambda.push_back(sol.value(prog.s[k]) / sol.value(prog.t[k]));
    }
    it.W = denormalize(sol, prog.W, prog.links);
    return it;
  };
  return detail::run_spca(spec.link, floors, solution::web_mos_model(spec.services), options,
                          iterate);
}

}  // namespace qoebf::sdr
