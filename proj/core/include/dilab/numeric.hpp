// Copyright 2026 The dilab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "dilab/errors.hpp"

namespace dilab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical thresholds shared by every checker.
///
/// rank_eps is the cutoff below which singular values and eigenvalues count as
/// zero; residual_eps is the acceptance threshold for operator identities.
struct Tolerance {
  double rank_eps = 1e-9;
  double residual_eps = 1e-8;

  /// Throws InvalidTolerance unless both thresholds lie in (0, 1).
  void validate() const;
};

/// Throws NonFiniteEntry if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);
void require_square(const Matrix& m, std::string_view what);

/// Largest singular value; 0 for empty matrices.
double op_norm(const Matrix& m);

/// Operator norm of M - M*.
double hermitian_defect(const Matrix& m);

/// Hermitian square root of a positive semidefinite matrix.
///
/// Eigenvalues in [-rank_eps, 0) are clamped to zero, and so are positive ones
/// below 16 n eps max(1, ||M||), which are rounding noise. Throws NotHermitian when
/// ||M - M*|| exceeds residual_eps and NotPSD when an eigenvalue is below
/// -rank_eps.
Matrix hermitian_sqrt(const Matrix& m, const Tolerance& tol = {});

/// Orthonormal basis of the range of M, one column per singular value above
/// rank_eps. Columns come in descending singular-value order and each column
/// is phase-normalized so that its first nonzero component is real positive.
Matrix range_basis(const Matrix& m, const Tolerance& tol = {});

/// max(||M*M - I||, ||MM* - I||) in operator norm.
double unitarity_defect(const Matrix& m);

/// Eigenpairs of a Hermitian matrix, eigenvalues descending, eigenvectors
/// phase-normalized like range_basis columns.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};
HermitianEigen hermitian_eigen(const Matrix& m);

/// Cosines of the principal angles between the column spans of two matrices
/// with orthonormal columns, descending.
RealVector principal_angle_cosines(const Matrix& q1, const Matrix& q2);

/// Multiply each column by a unit phase so its first component with modulus
/// above a relative threshold is real and positive.
void phase_normalize_columns(Matrix& m);

/// Kronecker product a (x) b, a being the more significant factor.
Matrix kron(const Matrix& a, const Matrix& b);

/// Sum of the absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Matrix& hermitian);

/// Largest eigenvalue modulus.
double spectral_radius(const Matrix& m);

/// A unitary Q with Q from = to for unit vectors of equal dimension: a phased
/// Householder reflection, or the identity when from = to.
Matrix unitary_mapping(const Vector& from, const Vector& to);

}  // namespace dilab
