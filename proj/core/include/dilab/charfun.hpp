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
#include <limits>
#include <vector>

#include "dilab/contraction.hpp"
#include "dilab/dilation.hpp"

namespace dilab {

/// p_j = ||T^{*j}|| for j = 0, 1, ... together with a certified bound S on
/// the full sum. Once some p_J <= 1/2, submultiplicativity gives
/// S <= (p_0 + ... + p_{J-1}) / (1 - p_J).
struct PowerNormSeries {
  std::vector<double> norms;
  double sum_bound = std::numeric_limits<double>::infinity();

  bool summable() const noexcept { return sum_bound < std::numeric_limits<double>::infinity(); }
  /// ||T^{*m}||, using monotonicity past the computed range.
  double at(std::size_t m) const noexcept;
  /// Certified bound on sum_{j >= m} ||T^{*j}||.
  double tail_sum(std::size_t m) const noexcept;
};

/// Truncation degree picked by the tail rule: the smallest N with
/// ||T^{*(N-1)}|| * S <= target, capped.
struct TruncationRule {
  std::size_t degree = 1;
  /// Bound on sum_{n >= N} ||Theta_n||.
  double tail_bound = std::numeric_limits<double>::infinity();
  bool certified = false;
  PowerNormSeries powers;
};

inline constexpr std::size_t kTruncationCap = 2048;

TruncationRule truncation_rule(const DefectData& dd, double target, std::size_t cap = kTruncationCap);
/// truncation_rule with target residual_eps / 10.
TruncationRule truncation_rule(const DefectData& dd);

/// Coefficients (D_* h, D_* T^* h, ..., D_* T^{*(N-1)} h) of Ch in basis_Dstar.
struct EmbeddingC {
  std::vector<Vector> levels;
  /// ||T^{*N} h||, the exact norm lost to truncation when T is *-stable.
  double truncation_loss = 0.0;
  /// ||T^{*N}|| ||h|| / (1 - spectral radius); infinite when not *-stable.
  double tail_bound = 0.0;
  bool star_stable = false;
};

EmbeddingC embed_C(const DefectData& dd, const Vector& h, std::size_t degree);

/// Taylor coefficients Theta_0 = -T|_D and Theta_n = D_* T^{*(n-1)} D|_D in
/// the defect bases.
struct CharacteristicFunction {
  std::vector<Matrix> coeffs;
  /// Bound on sum_{n >= N} ||Theta_n||.
  double tail_bound = std::numeric_limits<double>::infinity();
  bool star_stable = false;
  double rank_eps = 1e-9;

  std::size_t degree() const noexcept { return coeffs.size(); }
};

CharacteristicFunction theta_coefficients(const DefectData& dd, std::size_t degree);
/// Degree from the tail rule.
CharacteristicFunction theta_coefficients(const DefectData& dd);

struct ThetaValue {
  Matrix value;
  double tail_bound = 0.0;
};

/// sum_n Theta_n z^n. Throws OutsideDisc for |z| > 1 + rank_eps and
/// NotStarStable on the boundary when T is not *-stable.
ThetaValue theta_eval(const CharacteristicFunction& cf, Complex z);

/// Coefficients of Ch + Theta f in H^2(D_*), truncated at degree N_out.
struct ModelImage {
  std::vector<Vector> levels;
  /// Bound on the norm of the discarded coefficients.
  double tail_bound = 0.0;

  double squared_norm() const;
};

/// v must live in H + H^2(D); N_out must be at least v's truncation degree,
/// otherwise TruncationOverflow.
ModelImage model_map_W(const DefectData& dd, const DilationVector& v, std::size_t n_out);

/// ||W U v - S W v|| over the first N_out coefficients, S the shift on
/// H^2(D_*). Needs the same headroom as dilation_apply.
double intertwining_residual(const DefectData& dd, const DilationVector& v, std::size_t n_out);

/// R^*_{n-1} ... R^*_0 v for n = 1..steps, compared with W v.
///
/// The error of step n measures the hybrid vector against W v with D and D_*
/// levels kept apart: ||h_n||^2 + sum_{k<n} ||b_k - (Wv)_k||^2 +
/// sum_{k>=n} (||(Wv)_k||^2 + ||a_k||^2). Past the support degree of f it is
/// bounded by sqrt(2) ||T^{*(n-deg)}|| ||v||.
struct LimitResult {
  DilationVector final_vector;
  std::vector<double> h_norms;
  std::vector<double> errors;
  /// ||T^{*(n-deg)}|| for every step, 1 before the support degree.
  std::vector<double> power_norms;
  /// Max distance between the leg products and the closed induction formula.
  double induction_residual = 0.0;
  double constant = 1.4142135623730951;
  std::size_t support_degree = 0;
  /// Bound on the part of W v beyond the reference degree.
  double reference_tail = 0.0;
  bool bound_holds = false;
  bool converged = false;
};

LimitResult limit_product_What(const DefectData& dd, std::size_t steps, const DilationVector& v);

/// Compares the complement of C H with Theta H^2(D) inside H^2_N(D_*), on
/// the coefficients of degree below low_degree.
struct BeurlingResult {
  /// ||(I - P_C - P_Theta) E_L||, E_L the inclusion of degrees < L.
  double residual = 0.0;
  /// Largest principal-angle cosine between the two spans.
  double cross_cosine = 0.0;
  /// sum_{j >= N-L} ||T^{*j}||, the first-order truncation loss.
  double tail_bound = 0.0;
  std::size_t degree = 0;
  std::size_t low_degree = 0;
};

/// low_degree 0 selects N / 2. Throws NotStarStable unless spectral radius is
/// below 1 - rank_eps.
BeurlingResult beurling_residual(const DefectData& dd, std::size_t degree,
                                 std::size_t low_degree = 0);

}  // namespace dilab
