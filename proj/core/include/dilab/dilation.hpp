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

#include "dilab/contraction.hpp"

namespace dilab {

/// Shape of a truncated vector-valued Hardy space with coefficients
/// a_0..a_{N-1}. The first star_levels levels carry D_* coordinates and the
/// rest carry D coordinates, so H^2(D_{*,k}) has star_levels = k + 1 and the
/// plain H^2(D) has star_levels = 0.
struct HardyLayout {
  std::size_t degree = 1;
  std::size_t star_levels = 0;

  std::vector<Index> level_dims(const DefectData& dd) const;
};

/// h + (a_0, ..., a_{N-1}) in H + H^2_N(D_{*,k}).
struct DilationVector {
  Vector h;
  std::vector<Vector> levels;
  std::size_t star_levels = 0;

  std::size_t degree() const noexcept { return levels.size(); }
  HardyLayout layout() const noexcept { return {levels.size(), star_levels}; }
  double squared_norm() const;
  double norm() const;
};

DilationVector zero_dilation_vector(const DefectData& dd, HardyLayout layout);

/// Throws LevelMismatch unless every level has the dimension its layout asks
/// for and h lives in H.
void check_conformance(const DefectData& dd, const DilationVector& v);

/// Distance between two vectors of identical layout.
double distance(const DilationVector& a, const DilationVector& b);

/// Number of leading levels needed to hold every coefficient above eps.
std::size_t support_degree(const DilationVector& v, double eps);

/// The minimal isometric dilation U: h + f -> Th + (Dh + z f).
///
/// v must live in the pure D space and its top coefficient must vanish (up to
/// rank_eps) so the shift loses nothing; otherwise TruncationOverflow.
DilationVector dilation_apply(const DefectData& dd, const DilationVector& v);

/// R_k: H + H^2(D_{*,k}) -> H + H^2(D_{*,k-1}), the rotation acting on H and
/// level k. Throws LevelMismatch if v does not carry exactly k + 1 star levels.
DilationVector leg_apply(const DefectData& dd, std::size_t k, const DilationVector& v);

/// R_k^*: H + H^2(D_{*,k-1}) -> H + H^2(D_{*,k}).
DilationVector leg_adjoint_apply(const DefectData& dd, std::size_t k, const DilationVector& v);

/// T^n h + (D T^{n-1} h, ..., D h, z^n f): the closed form of U^n.
DilationVector power_closed_form(const DefectData& dd, std::size_t n, const DilationVector& v);

/// max(||U^n v - R_0...R_{n-1}(h + z^n f)||, ||U^n v - closed form||).
///
/// Requires the coefficients of f to vanish from level N - n on, otherwise
/// TruncationOverflow.
double power_factorization_residual(const DefectData& dd, std::size_t n, const DilationVector& v);

}  // namespace dilab
