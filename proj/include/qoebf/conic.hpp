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

// Declarative conic programs over real scalars and Hermitian PSD blocks.
//
// A program maximizes a linear function of its scalar variables subject to
//   linear      sum a_i x_i + sum <A_m, W_m> + c  {<=, =, >=}  b
//   SOC         ||(u_1, ..., u_d)|| <= t
//   rotated SOC ||(u_1, ..., u_d)||^2 <= 2 x y,  x, y >= 0
//   exponential y * exp(x / y) <= z,  y > 0
//   PSD         W_m >= 0 (every block variable)
// where every cone argument is an affine expression. <A, W> is the real
// Frobenius inner product Re tr(A W) of Hermitian matrices.
//
// Mapping for logarithms: ln(t) >= c  <=>  (c, 1, t) in the exponential cone.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qoebf/numerics.hpp"

namespace qoebf::conic {

struct ScalarVar {
  std::size_t index = 0;
};

struct PsdVar {
  std::size_t index = 0;
};

struct ConstraintId {
  std::size_t index = 0;
};

/// Block coefficient stored in factored form sum_r weight_r v_r v_r^H. Dense
/// Hermitian coefficients are factored on insertion; rank-one terms such as
/// h h^H or the antenna selectors stay rank one.
struct BlockTerm {
  std::size_t block = 0;
  Eigen::MatrixXcd factors;  // n x r
  Eigen::VectorXd weights;   // r

  HermitianMatrix dense() const;
  double evaluate(const HermitianMatrix& w) const;
};

class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(double constant) : constant_(constant) {}  // NOLINT: implicit by design of the DSL
  AffineExpr(ScalarVar v, double coeff = 1.0);           // NOLINT

  AffineExpr& add(ScalarVar v, double coeff);
  /// + <coeff, W>.
  AffineExpr& add(PsdVar w, const HermitianMatrix& coeff);
  /// + scale * h^H W h.
  AffineExpr& add_quadratic(PsdVar w, const ComplexVector& h, double scale = 1.0);
  /// + scale * W(q, q).
  AffineExpr& add_diagonal(PsdVar w, Eigen::Index q, Eigen::Index dim, double scale = 1.0);
  AffineExpr& add_constant(double c);

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

  double constant() const { return constant_; }
  const std::vector<std::pair<std::size_t, double>>& scalar_terms() const { return scalars_; }
  const std::vector<BlockTerm>& block_terms() const { return blocks_; }

 private:
  double constant_ = 0.0;
  std::vector<std::pair<std::size_t, double>> scalars_;
  std::vector<BlockTerm> blocks_;
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

enum class ConeKind { kNonnegative, kZero, kSecondOrder, kRotatedSecondOrder, kExponential };

/// A constraint "args in cone". Linear constraints are normalized into a
/// single argument that must be >= 0 (kNonnegative) or == 0 (kZero). SOC
/// arguments are (t, u_1, ..., u_d), rotated SOC (x, y, u_1, ..., u_d) and
/// exponential (x, y, z).
struct Constraint {
  ConeKind kind = ConeKind::kNonnegative;
  std::vector<AffineExpr> args;
  std::string name;
};

struct ScalarInfo {
  std::string name;
  std::optional<double> lower_bound;
};

struct BlockInfo {
  std::string name;
  Eigen::Index dim = 0;
};

class ConeProgram {
 public:
  /// A lower bound becomes a linear constraint x >= lb.
  ScalarVar add_scalar(const std::string& name, std::optional<double> lower_bound = std::nullopt);
  PsdVar add_psd_block(const std::string& name, Eigen::Index dim);

  ConstraintId add_linear(const AffineExpr& lhs, Relation rel, double rhs,
                          const std::string& name = "");
  /// ||u|| <= t.
  ConstraintId add_soc(const AffineExpr& t, const std::vector<AffineExpr>& u,
                       const std::string& name = "");
  /// ||u||^2 <= 2 x y with x, y >= 0. Equivalent to an SOC but keeps
  /// products of large quantities out of the barrier.
  ConstraintId add_rotated_soc(const AffineExpr& x, const AffineExpr& y,
                               const std::vector<AffineExpr>& u, const std::string& name = "");
  /// y exp(x / y) <= z.
  ConstraintId add_exp(const AffineExpr& x, const AffineExpr& y, const AffineExpr& z,
                       const std::string& name = "");

  /// Maximize objective. Only scalar terms are allowed.
  void maximize(const AffineExpr& objective);

  std::size_t num_scalars() const { return scalars_.size(); }
  std::size_t num_blocks() const { return blocks_.size(); }
  const std::vector<ScalarInfo>& scalars() const { return scalars_; }
  const std::vector<BlockInfo>& blocks() const { return blocks_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const AffineExpr& objective() const { return objective_; }

  std::size_t count_constraints(ConeKind kind) const;
  /// Number of constraints whose name starts with prefix.
  std::size_t count_named(const std::string& prefix) const;

  /// Human-readable listing of variables, cones and coefficients.
  std::string dump() const;

 private:
  void check(const AffineExpr& e) const;
  void check_name(const std::string& name) const;

  std::vector<ScalarInfo> scalars_;
  std::vector<BlockInfo> blocks_;
  std::vector<Constraint> constraints_;
  AffineExpr objective_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIterations, kNumericalFailure };

std::string to_string(SolveStatus status);

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double gap_tol = 1e-6;  // relative to max(1, |objective|)
  int max_iterations = 400;  // Newton steps per phase
  double barrier_growth = 20.0;
  double newton_tol = 1e-9;  // half squared Newton decrement ending a centering
};

struct SolverDiagnostics {
  int phase1_iterations = 0;
  int iterations = 0;  // phase-two Newton steps
  double gap_bound = 0.0;  // barrier degree / t at termination
  double equality_residual = 0.0;
  double barrier_degree = 0.0;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> scalars;
  std::vector<HermitianMatrix> blocks;
  SolverDiagnostics diagnostics;

  double value(ScalarVar v) const { return scalars.at(v.index); }
  const HermitianMatrix& value(PsdVar w) const { return blocks.at(w.index); }
  bool optimal() const { return status == SolveStatus::kOptimal; }
};

/// Barrier interior-point method: phase one drives a relaxation scalar below
/// zero to find a strictly feasible point, phase two follows the central path
/// until the gap bound drops below tolerance.
ConicSolution solve(const ConeProgram& program, const SolverOptions& options = {});

/// Same, starting from start's values when they are strictly feasible for
/// every cone (phase one is then skipped).
ConicSolution solve(const ConeProgram& program, const SolverOptions& options,
                    const ConicSolution& start);

/// Evaluates an affine expression at a solution.
double evaluate(const AffineExpr& e, const ConicSolution& solution);

}  // namespace qoebf::conic
