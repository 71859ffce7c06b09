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
#include "dilab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dilab {

void Tolerance::validate() const {
  if (!(rank_eps > 0.0 && rank_eps < 1.0)) {
    throw InvalidTolerance("rank_eps must lie in (0, 1), got " + std::to_string(rank_eps));
  }
  if (!(residual_eps > 0.0 && residual_eps < 1.0)) {
    throw InvalidTolerance("residual_eps must lie in (0, 1), got " +
                           std::to_string(residual_eps));
  }
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw NonFiniteEntry(std::string(what) + ": matrix has NaN or infinite entries");
  }
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(what) + ": expected a square matrix, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double hermitian_defect(const Matrix& m) {
  require_square(m, "hermitian_defect");
  return op_norm(m - m.adjoint());
}

void phase_normalize_columns(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    auto col = m.col(j);
    const double scale = col.cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (Index i = 0; i < col.size(); ++i) {
      const double mag = std::abs(col(i));
      if (mag > 1e-10 * scale) {
        col *= std::conj(col(i)) / mag;
        col(i) = Complex(std::abs(col(i)), 0.0);
        break;
      }
    }
  }
}

HermitianEigen hermitian_eigen(const Matrix& m) {
  require_square(m, "hermitian_eigen");
  HermitianEigen out;
  if (m.rows() == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  const Matrix sym = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Index n = m.rows();
  out.values.resize(n);
  out.vectors.resize(n, n);
  // ascending -> descending
  for (Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  phase_normalize_columns(out.vectors);
  return out;
}

Matrix hermitian_sqrt(const Matrix& m, const Tolerance& tol) {
  tol.validate();
  require_square(m, "hermitian_sqrt");
  require_finite(m, "hermitian_sqrt");
  const double asym = hermitian_defect(m);
  if (asym > tol.residual_eps) {
    throw NotHermitian("hermitian_sqrt: ||M - M*|| = " + std::to_string(asym));
  }
  if (m.rows() == 0) return m;
  const HermitianEigen eig = hermitian_eigen(m);
  // Eigenvalues at rounding level are zero in disguise; their square roots
  // would be of order 1e-8 and register as spurious rank.
  const double scale = std::max(1.0, std::abs(eig.values(0)));
  const double floor = 16.0 * static_cast<double>(m.rows()) *
                       std::numeric_limits<double>::epsilon() * scale;
  RealVector roots(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k) {
    const double lambda = eig.values(k);
    if (lambda < -tol.rank_eps) {
      throw NotPSD("hermitian_sqrt: eigenvalue " + std::to_string(lambda) + " below -rank_eps");
    }
    roots(k) = lambda <= floor ? 0.0 : std::sqrt(lambda);
  }
  Matrix s = eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return (s + s.adjoint()) * 0.5;
}

Matrix range_basis(const Matrix& m, const Tolerance& tol) {
  tol.validate();
  require_finite(m, "range_basis");
  if (m.size() == 0) return Matrix(m.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > tol.rank_eps) ++rank;
  Matrix basis = svd.matrixU().leftCols(rank);
  phase_normalize_columns(basis);
  return basis;
}

double unitarity_defect(const Matrix& m) {
  require_square(m, "unitarity_defect");
  if (m.rows() == 0) return 0.0;
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  return std::max(op_norm(m.adjoint() * m - id), op_norm(m * m.adjoint() - id));
}

RealVector principal_angle_cosines(const Matrix& q1, const Matrix& q2) {
  if (q1.rows() != q2.rows()) {
    throw DimensionMismatch("principal_angle_cosines: ambient dimensions differ");
  }
  if (q1.cols() == 0 || q2.cols() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> svd(q1.adjoint() * q2);
  return svd.singularValues();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double trace_norm(const Matrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es((hermitian + hermitian.adjoint()) * 0.5,
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double spectral_radius(const Matrix& m) {
  require_square(m, "spectral_radius");
  if (m.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix unitary_mapping(const Vector& from, const Vector& to) {
  if (from.size() != to.size()) throw DimensionMismatch("unitary_mapping: dimensions differ");
  const Index n = from.size();
  if (std::abs(from.norm() - 1.0) > 1e-12 || std::abs(to.norm() - 1.0) > 1e-12) {
    throw DimensionMismatch("unitary_mapping: vectors must have unit norm");
  }
  // Rotate the target by the phase of <to, from> so the reflection can swap them.
  const Complex overlap = to.dot(from);
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0, 0.0);
  const Vector target = phase * to;
  const Vector w = from - target;
  Matrix q = Matrix::Identity(n, n);
  if (w.norm() > 1e-14) q -= 2.0 * w * w.adjoint() / w.squaredNorm();
  return std::conj(phase) * q;
}

}  // namespace dilab
