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

#include "qoebf/conic.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qoebf::conic {

HermitianMatrix BlockTerm::dense() const {
  return HermitianMatrix::FromUpper(factors * weights.cast<Complex>().asDiagonal() *
                                    factors.adjoint());
}

double BlockTerm::evaluate(const HermitianMatrix& w) const {
  double total = 0.0;
  for (Eigen::Index r = 0; r < factors.cols(); ++r) {
    const auto v = factors.col(r);
    total += weights(r) * v.dot(w.dense() * v).real();
  }
  return total;
}

AffineExpr::AffineExpr(ScalarVar v, double coeff) { add(v, coeff); }

AffineExpr& AffineExpr::add(ScalarVar v, double coeff) {
  if (coeff != 0.0) scalars_.emplace_back(v.index, coeff);
  return *this;
}

AffineExpr& AffineExpr::add(PsdVar w, const HermitianMatrix& coeff) {
  const HermitianEigen eig = hermitian_eigen(coeff);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values(i)) > 1e-14 * scale) keep.push_back(i);
  }
  BlockTerm term;
  term.block = w.index;
  term.factors.resize(coeff.dim(), static_cast<Eigen::Index>(keep.size()));
  term.weights.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    term.factors.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]);
    term.weights(static_cast<Eigen::Index>(c)) = eig.values(keep[c]);
  }
  blocks_.push_back(std::move(term));
  return *this;
}

AffineExpr& AffineExpr::add_quadratic(PsdVar w, const ComplexVector& h, double scale) {
  BlockTerm term;
  term.block = w.index;
  term.factors = h;
  term.weights = Eigen::VectorXd::Constant(1, scale);
  blocks_.push_back(std::move(term));
  return *this;
}

AffineExpr& AffineExpr::add_diagonal(PsdVar w, Eigen::Index q, Eigen::Index dim, double scale) {
  if (q < 0 || q >= dim) throw std::invalid_argument("add_diagonal: index out of range");
  BlockTerm term;
  term.block = w.index;
  term.factors = Eigen::VectorXcd::Unit(dim, q);
  term.weights = Eigen::VectorXd::Constant(1, scale);
  blocks_.push_back(std::move(term));
  return *this;
}

AffineExpr& AffineExpr::add_constant(double c) {
  constant_ += c;
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  constant_ += other.constant_;
  scalars_.insert(scalars_.end(), other.scalars_.begin(), other.scalars_.end());
  blocks_.insert(blocks_.end(), other.blocks_.begin(), other.blocks_.end());
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  AffineExpr negated = other;
  negated *= -1.0;
  return *this += negated;
}

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  for (auto& [index, coeff] : scalars_) coeff *= s;
  for (auto& term : blocks_) term.weights *= s;
  return *this;
}

void ConeProgram::check_name(const std::string& name) const {
  for (const auto& s : scalars_) {
    if (s.name == name) throw std::invalid_argument("duplicate variable name '" + name + "'");
  }
  for (const auto& b : blocks_) {
    if (b.name == name) throw std::invalid_argument("duplicate variable name '" + name + "'");
  }
}

void ConeProgram::check(const AffineExpr& e) const {
  for (const auto& [index, coeff] : e.scalar_terms()) {
    if (index >= scalars_.size()) throw std::invalid_argument("dangling scalar handle");
    if (!std::isfinite(coeff)) throw std::invalid_argument("non-finite scalar coefficient");
  }
  for (const auto& term : e.block_terms()) {
    if (term.block >= blocks_.size()) throw std::invalid_argument("dangling PSD block handle");
    if (term.factors.rows() != blocks_[term.block].dim) {
      throw std::invalid_argument("coefficient dimension does not match block '" +
                                  blocks_[term.block].name + "'");
    }
    if (!term.factors.allFinite() || !term.weights.allFinite()) {
      throw std::invalid_argument("non-finite block coefficient");
    }
  }
  if (!std::isfinite(e.constant())) throw std::invalid_argument("non-finite constant");
}

ScalarVar ConeProgram::add_scalar(const std::string& name, std::optional<double> lower_bound) {
  check_name(name);
  scalars_.push_back({name, lower_bound});
  const ScalarVar v{scalars_.size() - 1};
  if (lower_bound) add_linear(AffineExpr(v), Relation::kGreaterEqual, *lower_bound, "lb:" + name);
  return v;
}

PsdVar ConeProgram::add_psd_block(const std::string& name, Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("PSD block '" + name + "' must have dimension >= 1");
  check_name(name);
  blocks_.push_back({name, dim});
  return PsdVar{blocks_.size() - 1};
}

ConstraintId ConeProgram::add_linear(const AffineExpr& lhs, Relation rel, double rhs,
                                     const std::string& name) {
  check(lhs);
  Constraint c;
  c.name = name;
  switch (rel) {
    case Relation::kLessEqual:
      c.kind = ConeKind::kNonnegative;
      c.args.push_back(AffineExpr(rhs) - lhs);
      break;
    case Relation::kGreaterEqual:
      c.kind = ConeKind::kNonnegative;
      c.args.push_back(lhs - AffineExpr(rhs));
      break;
    case Relation::kEqual:
      c.kind = ConeKind::kZero;
      c.args.push_back(lhs - AffineExpr(rhs));
      break;
  }
  constraints_.push_back(std::move(c));
  return ConstraintId{constraints_.size() - 1};
}

ConstraintId ConeProgram::add_soc(const AffineExpr& t, const std::vector<AffineExpr>& u,
                                  const std::string& name) {
  if (u.empty()) throw std::invalid_argument("add_soc: empty norm argument");
  check(t);
  for (const auto& e : u) check(e);
  Constraint c;
  c.kind = ConeKind::kSecondOrder;
  c.name = name;
  c.args.push_back(t);
  c.args.insert(c.args.end(), u.begin(), u.end());
  constraints_.push_back(std::move(c));
  return ConstraintId{constraints_.size() - 1};
}

ConstraintId ConeProgram::add_rotated_soc(const AffineExpr& x, const AffineExpr& y,
                                          const std::vector<AffineExpr>& u,
                                          const std::string& name) {
  if (u.empty()) throw std::invalid_argument("add_rotated_soc: empty norm argument");
  check(x);
  check(y);
  for (const auto& e : u) check(e);
  Constraint c;
  c.kind = ConeKind::kRotatedSecondOrder;
  c.name = name;
  c.args = {x, y};
  c.args.insert(c.args.end(), u.begin(), u.end());
  constraints_.push_back(std::move(c));
  return ConstraintId{constraints_.size() - 1};
}

ConstraintId ConeProgram::add_exp(const AffineExpr& x, const AffineExpr& y, const AffineExpr& z,
                                  const std::string& name) {
  check(x);
  check(y);
  check(z);
  constraints_.push_back({ConeKind::kExponential, {x, y, z}, name});
  return ConstraintId{constraints_.size() - 1};
}

void ConeProgram::maximize(const AffineExpr& objective) {
  check(objective);
  if (!objective.block_terms().empty()) {
    throw std::invalid_argument("objective may only reference scalar variables");
  }
  objective_ = objective;
}

std::size_t ConeProgram::count_constraints(ConeKind kind) const {
  std::size_t n = 0;
  for (const auto& c : constraints_) n += c.kind == kind ? 1 : 0;
  return n;
}

std::size_t ConeProgram::count_named(const std::string& prefix) const {
  std::size_t n = 0;
  for (const auto& c : constraints_) n += c.name.rfind(prefix, 0) == 0 ? 1 : 0;
  return n;
}

namespace {

void dump_expr(std::ostream& os, const AffineExpr& e, const ConeProgram& p) {
  os << e.constant();
  for (const auto& [index, coeff] : e.scalar_terms()) {
    os << " + " << coeff << "*" << p.scalars()[index].name;
  }
  for (const auto& term : e.block_terms()) {
    os << " + <" << p.blocks()[term.block].name << ", [";
    for (Eigen::Index r = 0; r < term.factors.cols(); ++r) {
      os << (r ? "; " : "") << term.weights(r) << " * v v^H, v = (";
      for (Eigen::Index i = 0; i < term.factors.rows(); ++i) {
        const Complex z = term.factors(i, r);
        os << (i ? " " : "") << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
           << "i";
      }
      os << ")";
    }
    os << "]>";
  }
}

const char* kind_name(ConeKind k) {
  switch (k) {
    case ConeKind::kNonnegative: return "nonneg";
    case ConeKind::kZero: return "zero";
    case ConeKind::kSecondOrder: return "soc";
    case ConeKind::kRotatedSecondOrder: return "rsoc";
    case ConeKind::kExponential: return "exp";
  }
  return "?";
}

}  // namespace

std::string ConeProgram::dump() const {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "scalars " << scalars_.size() << "\n";
  for (const auto& s : scalars_) os << "  scalar " << s.name << "\n";
  os << "blocks " << blocks_.size() << "\n";
  for (const auto& b : blocks_) os << "  psd " << b.name << " " << b.dim << "\n";
  os << "constraints " << constraints_.size() << "\n";
  for (const auto& c : constraints_) {
    os << "  " << kind_name(c.kind) << " " << (c.name.empty() ? "-" : c.name) << "\n";
    for (const auto& a : c.args) {
      os << "    ";
      dump_expr(os, a, *this);
      os << "\n";
    }
  }
  os << "maximize ";
  dump_expr(os, objective_, *this);
  os << "\n";
  return os.str();
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kMaxIterations: return "max_iter";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

double evaluate(const AffineExpr& e, const ConicSolution& solution) {
  double total = e.constant();
  for (const auto& [index, coeff] : e.scalar_terms()) total += coeff * solution.scalars.at(index);
  for (const auto& term : e.block_terms()) total += term.evaluate(solution.blocks.at(term.block));
  return total;
}

}  // namespace qoebf::conic
