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
#include "dilab/contraction.hpp"

#include <algorithm>
#include <string>

namespace dilab {

Contraction validate_contraction(const Matrix& m, const Tolerance& tol) {
  tol.validate();
  require_square(m, "validate_contraction");
  require_finite(m, "validate_contraction");
  const double norm = op_norm(m);
  if (norm > 1.0 + tol.rank_eps) {
    throw NotAContraction("validate_contraction: norm " + std::to_string(norm) + " exceeds 1",
                          norm);
  }
  return Contraction(m, norm);
}

DefectData defect_data(const Contraction& t, const Tolerance& tol) {
  tol.validate();
  const Matrix& T = t.matrix();
  const Index d = t.dim();
  const Matrix id = Matrix::Identity(d, d);

  // ||T|| may exceed 1 by rank_eps, so I - T*T may dip to -(2 rank_eps + rank_eps^2).
  Tolerance sqrt_tol = tol;
  sqrt_tol.rank_eps = std::min(3.0 * tol.rank_eps, 0.5);

  Matrix D = hermitian_sqrt(id - T.adjoint() * T, sqrt_tol);
  Matrix D_star = hermitian_sqrt(id - T * T.adjoint(), sqrt_tol);

  // The range of D is the range of D^2; thresholding D^2 keeps tiny spurious
  // square roots of rounding noise out of the defect spaces.
  Matrix basis_D = range_basis(D * D, tol);
  Matrix basis_Dstar = range_basis(D_star * D_star, tol);

  const Index k = basis_D.cols();
  const Index ks = basis_Dstar.cols();
  Matrix R(d + k, d + ks);
  R.topLeftCorner(d, d) = T;
  R.topRightCorner(d, ks) = D_star * basis_Dstar;
  R.bottomLeftCorner(k, d) = basis_D.adjoint() * D;
  R.bottomRightCorner(k, ks) = -basis_D.adjoint() * T.adjoint() * basis_Dstar;

  return DefectData{t, std::move(D), std::move(D_star), std::move(basis_D),
                    std::move(basis_Dstar), std::move(R), tol};
}

StabilityReport star_stability(const Contraction& t, std::size_t n_max, const Tolerance& tol) {
  tol.validate();
  if (n_max == 0) throw BadDims("star_stability: n_max must be positive");
  StabilityReport report;
  report.spectral_radius = spectral_radius(t.matrix());
  report.is_star_stable = report.spectral_radius < 1.0 - tol.rank_eps;
  const Matrix adj = t.matrix().adjoint();
  Matrix power = Matrix::Identity(t.dim(), t.dim());
  report.power_decay.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    power = adj * power;
    report.power_decay.push_back(op_norm(power));
  }
  return report;
}

Contraction random_contraction(Rng& rng, Index d, double margin) {
  if (d <= 0) throw BadDims("random_contraction: dimension must be positive");
  if (margin < 0.0) throw BadDims("random_contraction: margin must be nonnegative");
  Matrix g = rng.gaussian_matrix(d, d);
  g /= op_norm(g) * (1.0 + margin);
  return validate_contraction(g);
}

Contraction random_star_stable(Rng& rng, Index d, double max_radius) {
  if (!(max_radius > 0.0 && max_radius < 1.0)) {
    throw BadDims("random_star_stable: max_radius must lie in (0, 1)");
  }
  Matrix t = random_contraction(rng, d).matrix();
  const double rho = spectral_radius(t);
  if (rho > max_radius) t *= max_radius / rho;
  return validate_contraction(t);
}

Contraction random_unitary_contraction(Rng& rng, Index d) {
  if (d <= 0) throw BadDims("random_unitary_contraction: dimension must be positive");
  return validate_contraction(rng.haar_unitary(d));
}

}  // namespace dilab
