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
#include <optional>
#include <vector>

#include "dilab/numeric.hpp"
#include "dilab/random.hpp"

namespace dilab {

/// Unital completely positive map x -> sum_i A_i^* x A_i on d x d matrices.
class KrausMap {
 public:
  const std::vector<Matrix>& ops() const noexcept { return ops_; }
  Index dim() const noexcept { return dim_; }

 private:
  friend KrausMap make_kraus_map(std::vector<Matrix> ops, const Tolerance& tol);
  KrausMap(std::vector<Matrix> ops, Index dim) : ops_(std::move(ops)), dim_(dim) {}

  std::vector<Matrix> ops_;
  Index dim_;
};

/// Throws DimensionMismatch for ragged or non-square operators and NotUnital
/// when ||sum A_i^* A_i - I|| exceeds residual_eps.
KrausMap make_kraus_map(std::vector<Matrix> ops, const Tolerance& tol = {});

class DensityState {
 public:
  const Matrix& rho() const noexcept { return rho_; }
  Index dim() const noexcept { return rho_.rows(); }

 private:
  friend DensityState make_density_state(Matrix rho, const Tolerance& tol);
  explicit DensityState(Matrix rho) : rho_(std::move(rho)) {}

  Matrix rho_;
};

/// Hermitian within residual_eps, trace 1 within residual_eps, eigenvalues at
/// least -rank_eps; NotADensityState otherwise. Stored symmetrized.
DensityState make_density_state(Matrix rho, const Tolerance& tol = {});
DensityState vector_state(const Vector& psi);

Matrix apply_heisenberg(const KrausMap& z, const Matrix& x);
Matrix apply_schrodinger(const KrausMap& z, const Matrix& rho);
DensityState apply_schrodinger(const KrausMap& z, const DensityState& rho);

/// d^2 x d^2 matrix of the Heisenberg action on column-major vec(x):
/// sum_i A_i^T (x) A_i^*.
Matrix heisenberg_transfer_matrix(const KrausMap& z);
/// Same for the Schrodinger action: sum_i conj(A_i) (x) A_i.
Matrix schrodinger_transfer_matrix(const KrausMap& z);

/// Basis of {x : Z(x) = x}, the null space of the transfer matrix minus the
/// identity with singular values below rank_eps * max(1, ||L||).
std::vector<Matrix> fixed_point_space(const KrausMap& z, const Tolerance& tol = {});

/// Spectral data of the transfer matrix.
///
/// Eigenvalues within kUnitCluster of 1 form the fixed-point cluster.
/// second_modulus is the largest modulus outside that cluster (r_2), and
/// decay_modulus the largest modulus strictly inside the disc, which sets how
/// fast non-peripheral components die out. indeterminate flags a non-cluster
/// eigenvalue closer to 1 than kIndeterminateGap.
struct SpectralGap {
  double second_modulus = 0.0;
  double decay_modulus = 0.0;
  double min_distance_to_one = 0.0;
  bool indeterminate = false;

  static constexpr double kUnitCluster = 1e-7;
  static constexpr double kIndeterminateGap = 1e-3;
};

SpectralGap spectral_gap(const KrausMap& z);

/// 10 * ceil(1 / (1 - decay_modulus)) * ceil(log10(1 / target)), clamped to
/// [10, 20000].
std::size_t default_iteration_budget(const SpectralGap& gap, double target);

/// Diagonal projectors, the (e_i + e_j)/sqrt2 and (e_i + i e_j)/sqrt2
/// projectors for i < j, and the maximally mixed state.
std::vector<Matrix> probe_states(Index d);

struct AbsorptionResult {
  bool absorbing = false;
  /// Worst trace distance to |delta><delta| over the probes, one entry per step.
  std::vector<double> curve;
  std::size_t steps = 0;
  double invariance_residual = 0.0;
};

/// Iterates the predual action on the probe states. Throws NotInvariant when
/// ||Z_*(|delta><delta|) - |delta><delta||| exceeds residual_eps. n_max 0
/// selects default_iteration_budget with target = threshold. threshold 0
/// means residual_eps.
AbsorptionResult absorbing_check(const KrausMap& z, const Vector& delta, std::size_t n_max = 0,
                                 const Tolerance& tol = {}, double threshold = 0.0);

struct ErgodicityReport {
  std::size_t fixed_space_dim = 0;
  std::vector<Matrix> fixed_space_basis;
  bool is_ergodic = false;
  std::optional<Vector> invariant_vector;
  bool is_absorbing = false;
  std::vector<double> convergence_curve;
  SpectralGap gap;
  /// Smallest eigenvalue of Z^{n+1}(P) - Z^n(P), P = |delta><delta|.
  double monotonicity_slack = 0.0;
  bool monotone = false;
  /// ||Z^n(P) - I|| at the last step.
  double limit_distance = 0.0;
  bool limit_is_identity = false;
  bool agree = false;
};

/// Computes (d) absorption and (e) ergodicity independently. Throws
/// EquivalenceViolation if they disagree on an instance that is not flagged
/// indeterminate, or if the monotone limit misbehaves.
ErgodicityReport equivalence_report(const KrausMap& z, const Vector& delta, std::size_t n_max = 0,
                                    const Tolerance& tol = {}, double threshold = 0.0);

/// A_0 = diag(1, sqrt(1 - lambda)), A_1 = -sqrt(lambda) |0><1|.
KrausMap amplitude_damping(double lambda);
KrausMap unitary_conjugation(const Matrix& u);

/// Random unitary W on C^d (x) C^K with W(delta (x) e_0) = delta (x) c for a
/// random unit vector c: a Haar unitary followed by unitary_mapping.
Matrix random_fixing_unitary(Rng& rng, const Vector& delta, Index kraus);

struct InvariantInstance {
  KrausMap map;
  Vector delta;
};

/// Unital map with invariant vector state delta from a random unitary W on
/// C^d (x) C^K with W(delta (x) f_0) = delta (x) c; A_i = (I (x) <f_i|) W
/// (I (x) |f_0>). With split > 0 the unitary is block diagonal for
/// C^split + C^(d - split) and the map is not ergodic.
InvariantInstance random_invariant_map(Rng& rng, Index d, Index kraus, Index split = 0);

}  // namespace dilab
