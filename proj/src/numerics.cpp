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

#include "qoebf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qoebf {

HermitianMatrix::HermitianMatrix(Eigen::Index dim) : m_(Eigen::MatrixXcd::Zero(dim, dim)) {}

HermitianMatrix HermitianMatrix::Identity(Eigen::Index dim) {
  HermitianMatrix out(dim);
  out.m_.diagonal().setOnes();
  return out;
}

HermitianMatrix HermitianMatrix::FromUpper(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("HermitianMatrix::FromUpper: matrix is not square");
  }
  HermitianMatrix out(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out.m_(j, j) = Complex(m(j, j).real(), 0.0);
    for (Eigen::Index i = 0; i < j; ++i) {
      out.m_(i, j) = m(i, j);
      out.m_(j, i) = std::conj(m(i, j));
    }
  }
  return out;
}

HermitianMatrix HermitianMatrix::Outer(const ComplexVector& v) {
  return FromUpper(v * v.adjoint());
}

HermitianMatrix HermitianMatrix::Diagonal(const Eigen::VectorXd& d) {
  HermitianMatrix out(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) out.m_(i, i) = d(i);
  return out;
}

void HermitianMatrix::set(Eigen::Index i, Eigen::Index j, Complex value) {
  if (i == j) {
    m_(i, i) = Complex(value.real(), 0.0);
    return;
  }
  if (i > j) {
    std::swap(i, j);
    value = std::conj(value);
  }
  m_(i, j) = value;
  m_(j, i) = std::conj(value);
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  if (other.dim() != dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch");
  m_ += other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& other) {
  if (other.dim() != dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch");
  m_ -= other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

double quadratic_form(const ComplexVector& h, const HermitianMatrix& w) {
  if (h.size() != w.dim()) {
    throw std::invalid_argument("quadratic_form: vector length " + std::to_string(h.size()) +
                                " does not match matrix dimension " + std::to_string(w.dim()));
  }
  const Complex value = h.dot(w.dense() * h);  // dot() conjugates its left operand
  if (std::abs(value.imag()) > 1e-9 * std::abs(value.real()) + 1e-12) {
    throw NumericalError("quadratic_form: non-negligible imaginary part " +
                         std::to_string(value.imag()));
  }
  return value.real();
}

double inner_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
  // Re tr(AB) = sum_ij Re(A_ij conj(B_ij)) for Hermitian B.
  return (a.dense().array() * b.dense().array().conjugate()).real().sum();
}

Eigen::MatrixXd real_embedding(const HermitianMatrix& w) {
  const Eigen::Index n = w.dim();
  Eigen::MatrixXd out(2 * n, 2 * n);
  const Eigen::MatrixXd re = w.dense().real();
  const Eigen::MatrixXd im = w.dense().imag();
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return out;
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> embedded_eigensolver(const HermitianMatrix& w,
                                                                    bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      real_embedding(w), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric QR iteration did not converge");
  }
  return solver;
}

}  // namespace

Eigen::VectorXd hermitian_eigenvalues(const HermitianMatrix& w) {
  const Eigen::Index n = w.dim();
  if (n == 0) return {};
  const auto solver = embedded_eigensolver(w, false);
  const Eigen::VectorXd& e = solver.eigenvalues();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = 0.5 * (e(2 * i) + e(2 * i + 1));
  return out;
}

LeadingEigenpair leading_eigenpair(const HermitianMatrix& w) {
  const Eigen::Index n = w.dim();
  if (n == 0) throw std::invalid_argument("leading_eigenpair: empty matrix");
  const auto solver = embedded_eigensolver(w, true);
  const Eigen::VectorXd& e = solver.eigenvalues();
  const Eigen::VectorXd column = solver.eigenvectors().col(2 * n - 1);

  LeadingEigenpair out;
  out.value = 0.5 * (e(2 * n - 1) + e(2 * n - 2));
  out.second = n > 1 ? 0.5 * (e(2 * n - 3) + e(2 * n - 4))
                     : -std::numeric_limits<double>::infinity();
  out.vector.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.vector(i) = Complex(column(i), column(n + i));
  out.vector.normalize();
  return out;
}

HermitianEigen hermitian_eigen(const HermitianMatrix& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(w.dense());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

bool is_psd(const HermitianMatrix& w) {
  if (w.dim() == 0) return true;
  const Eigen::VectorXd values = hermitian_eigenvalues(w);
  const double lmin = values(0);
  const double lmax = values(values.size() - 1);
  return lmin >= -kPsdTolerance * std::max(1.0, lmax);
}

}  // namespace qoebf
