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

#include <cstddef>
#include <vector>

#include "dilab/numeric.hpp"
#include "dilab/random.hpp"

namespace dilab {

/// A square matrix with operator norm at most 1 + rank_eps.
class Contraction {
 public:
  const Matrix& matrix() const noexcept { return t_; }
  double norm() const noexcept { return norm_; }
  Index dim() const noexcept { return t_.rows(); }

 private:
  friend Contraction validate_contraction(const Matrix& m, const Tolerance& tol);
  Contraction(Matrix t, double norm) : t_(std::move(t)), norm_(norm) {}

  Matrix t_;
  double norm_;
};

/// Accepts M when its largest singular value is at most 1 + rank_eps, throws
/// NotAContraction otherwise.
Contraction validate_contraction(const Matrix& m, const Tolerance& tol = {});

/// Defect operators, defect-space bases and the rotation matrix of T.
///
/// R maps H + D_* to H + D and is stored in compressed coordinates: the first
/// dim(H) rows/columns are ambient, the remaining ones are coordinates in
/// basis_D (rows) and basis_Dstar (columns):
///
///     R = [ T             D_* B_*        ]
///         [ B^* D        -B^* T^* B_*    ]
struct DefectData {
  Contraction T;
  Matrix D;
  Matrix D_star;
  Matrix basis_D;
  Matrix basis_Dstar;
  Matrix R;
  Tolerance tol;

  Index dim_h() const noexcept { return T.dim(); }
  Index dim_defect() const noexcept { return basis_D.cols(); }
  Index dim_defect_star() const noexcept { return basis_Dstar.cols(); }
  const Matrix& t() const noexcept { return T.matrix(); }
};

DefectData defect_data(const Contraction& t, const Tolerance& tol = {});

struct StabilityReport {
  double spectral_radius = 0.0;
  /// ||T^{*n}|| for n = 1..n_max.
  std::vector<double> power_decay;
  bool is_star_stable = false;
};

/// In finite dimension T^{*n} -> 0 strongly iff the spectral radius is below 1;
/// the verdict uses spectral_radius < 1 - rank_eps and the power sequence is
/// reported as evidence.
StabilityReport star_stability(const Contraction& t, std::size_t n_max, const Tolerance& tol = {});

/// Complex Gaussian matrix divided by its norm times (1 + margin).
Contraction random_contraction(Rng& rng, Index d, double margin = 0.0);

/// random_contraction rescaled, when needed, so that its spectral radius is at
/// most max_radius.
Contraction random_star_stable(Rng& rng, Index d, double max_radius = 0.9);

/// Haar unitary, accepted as a (non *-stable) contraction.
Contraction random_unitary_contraction(Rng& rng, Index d);

}  // namespace dilab
