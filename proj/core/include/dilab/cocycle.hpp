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

#include <optional>
#include <string>
#include <vector>

#include "dilab/cp_dynamics.hpp"
#include "dilab/fock.hpp"
#include "dilab/numeric.hpp"
#include "dilab/random.hpp"

namespace dilab {

/// Locally generated cocycle on H (x) (C^m)^{(x) N}.
///
/// u is a unitary on H (x) C^m (index h * m + a); u_[j] is its copy acting
/// on H and slot j, and u_n = u_[1] u_[2] ... u_[n], so u_[n] acts first and
/// u_{n+s} = u_n gamma_n(u_s).
struct ToyCocycle {
  Index d = 1;
  Index m = 2;
  Index horizon = 1;
  Matrix u;
  Vector delta;

  FockLayout layout() const { return {d, m, horizon}; }
  FockLayout layout(Index slots) const { return {d, m, slots}; }
};

/// Throws BadDims (d < 1, m < 2, N < 1), DimensionMismatch, NotUnitary when
/// unitarity_defect(u) > residual_eps. delta is normalized.
ToyCocycle make_toy_cocycle(Matrix u, Index d, Index m, Index horizon, Vector delta,
                            const Tolerance& tol = {});

/// u_n v and u_n^* v on the dense layout of the full horizon; HorizonExceeded
/// when n > N.
Vector cocycle_apply(const ToyCocycle& c, Index n, const Vector& v);
Vector cocycle_adjoint_apply(const ToyCocycle& c, Index n, const Vector& v);

/// max ||[u_n, E_ab on slot j]|| over matrix units and slots j > n of the
/// dense layout. Commutators whose Frobenius norm is below 1e-10 report that
/// norm, an upper bound, instead of the exact operator norm.
double adaptedness_residual(const Matrix& u_n, const FockLayout& layout, Index n);

/// Same for a toy cocycle, on a window of one slot past n. When the dense
/// window would exceed 512 dimensions the residual is 0 by locality of the
/// generator and is not computed.
double adaptedness_residual(const ToyCocycle& c, Index n);

/// Kraus operators A_a = (I (x) <e_a|) u^* (I (x) |e_0>), so that
/// Z(x) = sum_a A_a^* x A_a = (I (x) <e_0|) u (x (x) I) u^* (I (x) |e_0>).
KrausMap compress_Z(const ToyCocycle& c);

/// max over matrix units x of ||Z^n(x) - (I (x) <Omega|) u_n (x (x) I) u_n^*
/// (I (x) |Omega>)|| with u_n built densely.
double z_consistency_residual(const ToyCocycle& c, Index n);

struct VacuumUnit {
  Vector omega_hat;
  /// Norm of the part of u^*(delta (x) e_0) orthogonal to delta (x) C^m.
  double product_residual = 0.0;
  /// ||u_2^*(delta (x) Omega) - delta (x) omega_hat (x) omega_hat||.
  double factorization_residual = 0.0;
};

/// Throws NoInvariantVector when ||Z_*(|delta><delta|) - |delta><delta||| >
/// residual_eps and NotProductForm when product_residual > residual_eps.
VacuumUnit vacuum_unit(const ToyCocycle& c, const Tolerance& tol = {});

/// v = H P with P = I + (e^{i theta} - 1)|e_0><e_0|, theta = arg omega_0, and
/// H the reflection swapping e^{i theta} e_0 and omega_hat. v e_0 = omega_hat,
/// v is the identity off span{e_0, omega_hat}, and v = I when omega_hat = e_0.
Matrix gauge_unitary(const Vector& omega_hat);

/// u -> u (I (x) v) with v = gauge_unitary(vacuum_unit(c).omega_hat).
ToyCocycle gauge_modify(const ToyCocycle& c, const Tolerance& tol = {});

/// ||u^*(delta (x) e_0) - delta (x) e_0||.
double vacuum_fixing_residual(const ToyCocycle& c);

/// Inner products of u_k^* phi for a vacuum-fixing cocycle, without the dense
/// Fock space. With A_a the Kraus operators of compress_Z and chi = u_L^* phi
/// for a probe phi of depth L, for L <= k <= k':
///   <u_k^* phi, u_{k'}^* phi'> = <chi, (Z^{k-L}(A_0^{k'-k}) (x) I) chi'>.
class ProbeDynamics {
 public:
  explicit ProbeDynamics(const ToyCocycle& c_hat);

  Index dim() const noexcept { return d_; }
  const std::vector<Matrix>& kraus() const noexcept { return a_; }
  Matrix z(const Matrix& x) const;
  Matrix z_power(const Matrix& x, Index n) const;
  /// The generator, for depth-one probes.
  const Matrix& generator() const noexcept { return u_; }

  /// sqrt(lambda_max(-(G + G^*))) with G = M - I: the largest ||(X - Y)phi||
  /// over unit phi when <X phi, Y phi'> = <phi, M phi'> and X, Y are isometric
  /// on the span. Taking G instead of M avoids cancelling against I.
  static double increment_from_gap(const Matrix& g);

 private:
  Index d_;
  Index m_;
  Matrix u_;
  std::vector<Matrix> a_;
};

struct ConvergenceCertificate {
  Index horizon = 0;
  Vector omega_hat;
  Matrix gauge_v;
  Matrix u_hat;
  /// Delta_n over the vacuum probes xi (x) Omega, n = 0..N.
  std::vector<double> delta_curve;
  /// Delta_n over probes with one excitation in slot 1, n = 1..N (entry n-1).
  std::vector<double> delta_curve_excited;
  /// sup_s ||(u_{n+s}^* - u_n^*) phi|| over vacuum probes, n + s <= N, n = 0..N-1.
  std::vector<double> cauchy_curve;
  /// max over n, s of (increment - 2 Delta_n), both probe families.
  double cauchy_excess = 0.0;
  /// Rounding floor sqrt(16 (N + 1) d m eps) of the square-root increments;
  /// the bound holds when the excess stays below residual_eps plus this.
  double cauchy_resolution = 0.0;
  bool cauchy_bound_holds = false;
  /// sup of increments with n >= N/2.
  double cauchy_tail = 0.0;
  bool convergent = false;
  /// sup_s ||(u_s - I) xi (x) Omega|| for xi = e_0..e_{d-1}, then delta.
  std::vector<double> range_increments;
  std::vector<bool> in_range;
  /// ||w w^* - q|| on the probe span.
  double q_defect = 0.0;
  /// ||Z^N(I) - I||.
  double isometry_defect = 0.0;
  /// u_N^* on the vacuum probes, when d m^N <= 4096.
  std::optional<Matrix> w_hat;
  double tolerance = 1e-6;
};

/// Raised when the horizon is too short to decide convergence; carries the
/// curves computed so far.
class Inconclusive : public Error {
 public:
  Inconclusive(const std::string& what, ConvergenceCertificate partial)
      : Error(what), partial_(std::move(partial)) {}
  const ConvergenceCertificate& partial() const noexcept { return partial_; }

 private:
  ConvergenceCertificate partial_;
};

/// Needs a vacuum-fixing cocycle (NotVacuumFixing otherwise). Convergent when
/// Delta_N <= conv_tol or the Cauchy tail is at most conv_tol; Inconclusive
/// otherwise.
ConvergenceCertificate convergence_analyze(const ToyCocycle& c_hat, const Tolerance& tol = {},
                                           double conv_tol = 1e-6);

/// sup over unit vacuum probes of ||(u_n - u_K gamma_n(u_K^*)) phi|| with
/// K = n + N, i.e. w approximated by u_K^* and the shifted copy reaching the
/// certificate's horizon past slot n. Bounded by 2 Delta_N. Throws
/// Inconclusive for a non-convergent certificate and NotIsometric when the
/// isometry defect exceeds residual_eps.
double exactness_residual(const ToyCocycle& c_hat, const ConvergenceCertificate& cert, Index n,
                          const Tolerance& tol = {});

/// The same quantity for an explicit K >= n.
double exactness_residual_at(const ToyCocycle& c_hat, Index n, Index k);

struct BeurlingReport {
  /// Clause (i): alpha_n(I (x) y) = I (x) gamma_n(y), i.e. adaptedness.
  double restriction_residual = 0.0;
  bool restriction_ok = false;
  /// Clause (ii): conjugacy through w, via convergence with w w^* = q and the
  /// reconstruction u_n = w^* gamma_n(w).
  bool has_certificate = false;
  std::string failure;
  double q_defect = 0.0;
  double exactness = 0.0;
  bool conjugacy_ok = false;
  /// Limit of Z_*^N(I/d) (x) |Omega><Omega| as a pure product vector.
  double purity_defect = 0.0;
  Index schmidt_rank = 0;
  double delta_overlap = 0.0;
  bool product_state_ok = false;
  bool beurling_type = false;
};

BeurlingReport beurling_report(const ToyCocycle& c, const Tolerance& tol = {},
                               double conv_tol = 1e-6, Index exact_steps = 5);

/// d = m = 2 generator with Kraus operators diag(1, sqrt(1 - lambda)) and
/// -sqrt(lambda)|0><1|; delta = e_0.
ToyCocycle amplitude_damping_cocycle(double lambda, Index horizon);
ToyCocycle identity_cocycle(Index d, Index m, Index horizon);
/// u = diag(i^k) (x) I; Z is conjugation by a unitary, delta = e_0.
ToyCocycle nonergodic_cocycle(Index d, Index m, Index horizon);
/// u^* = W K: W a random reset dilation (xi (x) e_0 -> delta (x) V xi, V a
/// random isometry, so m >= d), K = exp(i eps H) a random kick fixing
/// delta (x) e_0. Samples until the second eigenvalue modulus of Z is at most
/// max_modulus.
ToyCocycle random_ergodic_cocycle(Rng& rng, Index d, Index m, Index horizon,
                                  double max_modulus = 0.3);

}  // namespace dilab
