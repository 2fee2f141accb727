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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qoebf {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Raised when a numerical routine cannot produce a trustworthy result
/// (non-convergence, corrupted Hermitian storage, singular systems).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense Hermitian matrix. Every constructor and mutator writes the upper
/// triangle and mirrors it, so the stored matrix equals its conjugate
/// transpose bit for bit and the diagonal is real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(Eigen::Index dim);

  static HermitianMatrix Zero(Eigen::Index dim) { return HermitianMatrix(dim); }
  static HermitianMatrix Identity(Eigen::Index dim);
  /// Reads the upper triangle (including the diagonal, whose imaginary
  /// part is dropped) and mirrors it.
  static HermitianMatrix FromUpper(const Eigen::MatrixXcd& m);
  /// v v^H.
  static HermitianMatrix Outer(const ComplexVector& v);
  static HermitianMatrix Diagonal(const Eigen::VectorXd& d);

  Eigen::Index dim() const { return m_.rows(); }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  void set(Eigen::Index i, Eigen::Index j, Complex value);

  const Eigen::MatrixXcd& dense() const { return m_; }
  double trace() const { return m_.diagonal().real().sum(); }
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  HermitianMatrix& operator-=(const HermitianMatrix& other);
  HermitianMatrix& operator*=(double s);
  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

 private:
  Eigen::MatrixXcd m_;
};

/// h^H W h. Throws std::invalid_argument on a dimension mismatch and
/// NumericalError if the imaginary part is not round-off.
double quadratic_form(const ComplexVector& h, const HermitianMatrix& w);

/// Real Frobenius inner product <A, B> = Re tr(A B) of two Hermitian matrices.
double inner_product(const HermitianMatrix& a, const HermitianMatrix& b);

/// [[Re W, -Im W], [Im W, Re W]].
Eigen::MatrixXd real_embedding(const HermitianMatrix& w);

/// Eigenvalues of W in ascending order, obtained from the real embedding
/// with the doubled spectrum collapsed.
Eigen::VectorXd hermitian_eigenvalues(const HermitianMatrix& w);

struct LeadingEigenpair {
  double value = 0.0;
  ComplexVector vector;  // unit norm
  /// Second largest eigenvalue; -inf for 1x1 input.
  double second = 0.0;
};

LeadingEigenpair leading_eigenpair(const HermitianMatrix& w);

/// Full eigendecomposition W = V diag(values) V^H, values ascending.
struct HermitianEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};
HermitianEigen hermitian_eigen(const HermitianMatrix& w);

inline constexpr double kPsdTolerance = 1e-8;

/// lambda_min >= -kPsdTolerance * max(1, lambda_max).
bool is_psd(const HermitianMatrix& w);

}  // namespace qoebf
