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
#include "dilab/cp_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dilab {

namespace {

Matrix unvec(const Vector& v, Index d) {
  Matrix m(d, d);
  for (Index j = 0; j < d; ++j) m.col(j) = v.segment(j * d, d);
  return m;
}

Vector vec(const Matrix& m) {
  const Index d = m.rows();
  Vector v(d * m.cols());
  for (Index j = 0; j < m.cols(); ++j) v.segment(j * d, d) = m.col(j);
  return v;
}

void require_dim(const KrausMap& z, const Matrix& x, const char* where) {
  if (x.rows() != z.dim() || x.cols() != z.dim()) {
    throw DimensionMismatch(std::string(where) + ": expected " + std::to_string(z.dim()) + "x" +
                            std::to_string(z.dim()) + ", got " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()));
  }
}

double min_eigenvalue(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

KrausMap make_kraus_map(std::vector<Matrix> ops, const Tolerance& tol) {
  tol.validate();
  if (ops.empty()) throw DimensionMismatch("make_kraus_map: no Kraus operators");
  const Index d = ops.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& a : ops) {
    require_square(a, "make_kraus_map");
    require_finite(a, "make_kraus_map");
    if (a.rows() != d) throw DimensionMismatch("make_kraus_map: Kraus operators differ in size");
    sum += a.adjoint() * a;
  }
  const double defect = op_norm(sum - Matrix::Identity(d, d));
  if (defect > tol.residual_eps) {
    throw NotUnital("make_kraus_map: ||sum A_i^* A_i - I|| = " + std::to_string(defect));
  }
  return KrausMap(std::move(ops), d);
}

DensityState make_density_state(Matrix rho, const Tolerance& tol) {
  tol.validate();
  require_square(rho, "make_density_state");
  require_finite(rho, "make_density_state");
  if (rho.rows() == 0) throw NotADensityState("make_density_state: empty matrix");
  if (hermitian_defect(rho) > tol.residual_eps) {
    throw NotADensityState("make_density_state: not Hermitian");
  }
  const Matrix sym = (rho + rho.adjoint()) * 0.5;
  const double tr = sym.trace().real();
  if (std::abs(tr - 1.0) > tol.residual_eps) {
    throw NotADensityState("make_density_state: trace " + std::to_string(tr));
  }
  const double lo = min_eigenvalue(sym);
  if (lo < -tol.rank_eps) {
    throw NotADensityState("make_density_state: eigenvalue " + std::to_string(lo));
  }
  return DensityState(sym);
}

DensityState vector_state(const Vector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw NotADensityState("vector_state: zero vector");
  const Vector u = psi / n;
  return make_density_state(u * u.adjoint());
}

Matrix apply_heisenberg(const KrausMap& z, const Matrix& x) {
  require_dim(z, x, "apply_heisenberg");
  Matrix out = Matrix::Zero(z.dim(), z.dim());
  for (const auto& a : z.ops()) out.noalias() += a.adjoint() * x * a;
  return out;
}

Matrix apply_schrodinger(const KrausMap& z, const Matrix& rho) {
  require_dim(z, rho, "apply_schrodinger");
  Matrix out = Matrix::Zero(z.dim(), z.dim());
  for (const auto& a : z.ops()) out.noalias() += a * rho * a.adjoint();
  return out;
}

DensityState apply_schrodinger(const KrausMap& z, const DensityState& rho) {
  return make_density_state(apply_schrodinger(z, rho.rho()));
}

Matrix heisenberg_transfer_matrix(const KrausMap& z) {
  const Index d = z.dim();
  Matrix l = Matrix::Zero(d * d, d * d);
  for (const auto& a : z.ops()) l += kron(a.transpose(), a.adjoint());
  return l;
}

Matrix schrodinger_transfer_matrix(const KrausMap& z) {
  const Index d = z.dim();
  Matrix l = Matrix::Zero(d * d, d * d);
  for (const auto& a : z.ops()) l += kron(a.conjugate(), a);
  return l;
}

std::vector<Matrix> fixed_point_space(const KrausMap& z, const Tolerance& tol) {
  tol.validate();
  const Index d = z.dim();
  const Matrix l = heisenberg_transfer_matrix(z);
  const Matrix shifted = l - Matrix::Identity(d * d, d * d);
  const double cutoff = tol.rank_eps * std::max(1.0, op_norm(l));
  Eigen::BDCSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  Index first = 0;
  while (first < sigma.size() && sigma(first) > cutoff) ++first;
  Matrix null_space = svd.matrixV().rightCols(d * d - first);
  phase_normalize_columns(null_space);
  std::vector<Matrix> basis;
  for (Index k = 0; k < null_space.cols(); ++k) basis.push_back(unvec(null_space.col(k), d));
  return basis;
}

SpectralGap spectral_gap(const KrausMap& z) {
  const Matrix l = heisenberg_transfer_matrix(z);
  Eigen::ComplexEigenSolver<Matrix> es(l, false);
  SpectralGap gap;
  gap.min_distance_to_one = 2.0;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    const Complex lambda = es.eigenvalues()(k);
    const double dist = std::abs(lambda - 1.0);
    const double mod = std::abs(lambda);
    if (dist <= SpectralGap::kUnitCluster) continue;
    gap.second_modulus = std::max(gap.second_modulus, mod);
    gap.min_distance_to_one = std::min(gap.min_distance_to_one, dist);
    if (mod < 1.0 - SpectralGap::kUnitCluster) gap.decay_modulus = std::max(gap.decay_modulus, mod);
  }
  gap.indeterminate = gap.min_distance_to_one < SpectralGap::kIndeterminateGap;
  return gap;
}

std::size_t default_iteration_budget(const SpectralGap& gap, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw InvalidTolerance("default_iteration_budget: target must lie in (0, 1)");
  }
  const double relax = std::ceil(1.0 / (1.0 - gap.decay_modulus));
  const double digits = std::ceil(std::log10(1.0 / target));
  const double budget = 10.0 * relax * digits;
  return static_cast<std::size_t>(std::clamp(budget, 10.0, 20000.0));
}

std::vector<Matrix> probe_states(Index d) {
  if (d <= 0) throw BadDims("probe_states: dimension must be positive");
  std::vector<Matrix> probes;
  for (Index i = 0; i < d; ++i) {
    Matrix p = Matrix::Zero(d, d);
    p(i, i) = 1.0;
    probes.push_back(p);
  }
  const double s = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      for (const Complex phase : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
        Vector psi = Vector::Zero(d);
        psi(i) = s;
        psi(j) = s * phase;
        probes.push_back(psi * psi.adjoint());
      }
    }
  }
  probes.push_back(Matrix::Identity(d, d) / static_cast<double>(d));
  return probes;
}

AbsorptionResult absorbing_check(const KrausMap& z, const Vector& delta, std::size_t n_max,
                                 const Tolerance& tol, double threshold) {
  tol.validate();
  const Index d = z.dim();
  if (delta.size() != d) throw DimensionMismatch("absorbing_check: delta has the wrong dimension");
  if (std::abs(delta.norm() - 1.0) > tol.residual_eps) {
    throw DimensionMismatch("absorbing_check: delta must be a unit vector");
  }
  if (threshold == 0.0) threshold = tol.residual_eps;
  const Matrix target = delta * delta.adjoint();

  AbsorptionResult out;
  out.invariance_residual = op_norm(apply_schrodinger(z, target) - target);
  if (out.invariance_residual > tol.residual_eps) {
    throw NotInvariant("absorbing_check: Z_*(|delta><delta|) moved by " +
                       std::to_string(out.invariance_residual));
  }
  if (n_max == 0) n_max = default_iteration_budget(spectral_gap(z), threshold);

  const std::vector<Matrix> probes = probe_states(d);
  const Index count = static_cast<Index>(probes.size());
  Matrix states(d * d, count);
  for (Index k = 0; k < count; ++k) states.col(k) = vec(probes[static_cast<std::size_t>(k)]);
  const Matrix l = schrodinger_transfer_matrix(z);
  const Vector goal = vec(target);

  out.curve.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    states = l * states;
    double worst = 0.0;
    for (Index k = 0; k < count; ++k) {
      worst = std::max(worst, trace_norm(unvec(states.col(k) - goal, d)));
    }
    out.curve.push_back(worst);
    out.steps = n;
    if (worst <= threshold) {
      out.absorbing = true;
      break;
    }
  }
  return out;
}

ErgodicityReport equivalence_report(const KrausMap& z, const Vector& delta, std::size_t n_max,
                                    const Tolerance& tol, double threshold) {
  tol.validate();
  if (threshold == 0.0) threshold = tol.residual_eps;
  ErgodicityReport rep;
  rep.gap = spectral_gap(z);
  if (n_max == 0) n_max = default_iteration_budget(rep.gap, threshold);

  rep.fixed_space_basis = fixed_point_space(z, tol);
  rep.fixed_space_dim = rep.fixed_space_basis.size();
  rep.is_ergodic = rep.fixed_space_dim == 1;

  const AbsorptionResult abs = absorbing_check(z, delta, n_max, tol, threshold);
  rep.is_absorbing = abs.absorbing;
  rep.convergence_curve = abs.curve;
  rep.invariant_vector = delta;

  // Z^n(P) with P = |delta><delta| climbs in PSD order; its limit is a fixed
  // point, hence I when the map is ergodic.
  const Index d = z.dim();
  const Matrix id = Matrix::Identity(d, d);
  Matrix current = delta * delta.adjoint();
  rep.monotonicity_slack = 0.0;
  for (std::size_t n = 0; n < n_max; ++n) {
    Matrix next = apply_heisenberg(z, current);
    rep.monotonicity_slack = std::min(rep.monotonicity_slack, min_eigenvalue(next - current));
    current = std::move(next);
    rep.limit_distance = op_norm(current - id);
    if (rep.limit_distance <= threshold) break;
  }
  rep.monotone = rep.monotonicity_slack >= -tol.rank_eps;
  rep.limit_is_identity = rep.limit_distance <= threshold;
  rep.agree = rep.is_ergodic == rep.is_absorbing;

  if (!rep.gap.indeterminate) {
    if (!rep.agree) {
      throw EquivalenceViolation(std::string("equivalence_report: ergodic = ") +
                                 (rep.is_ergodic ? "true" : "false") + " but absorbing = " +
                                 (rep.is_absorbing ? "true" : "false"));
    }
    if (!rep.monotone) {
      throw EquivalenceViolation("equivalence_report: Z^n(|delta><delta|) not PSD-nondecreasing");
    }
    if (rep.is_ergodic && !rep.limit_is_identity) {
      throw EquivalenceViolation("equivalence_report: ergodic but Z^n(|delta><delta|) misses I");
    }
  }
  return rep;
}

KrausMap amplitude_damping(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw BadDims("amplitude_damping: lambda must lie in [0, 1]");
  Matrix a0 = Matrix::Zero(2, 2), a1 = Matrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - lambda);
  a1(0, 1) = -std::sqrt(lambda);
  return make_kraus_map({a0, a1});
}

KrausMap unitary_conjugation(const Matrix& u) {
  require_square(u, "unitary_conjugation");
  return make_kraus_map({u});
}

Matrix random_fixing_unitary(Rng& rng, const Vector& delta, Index kraus) {
  const Index d = delta.size();
  const Matrix x = rng.haar_unitary(d * kraus);
  const Vector c = rng.unit_vector(kraus);
  const Vector start = kron(delta, Vector::Unit(kraus, 0));
  const Vector goal = kron(delta, c);
  const Vector image = x * start;
  return unitary_mapping(image, goal) * x;
}

InvariantInstance random_invariant_map(Rng& rng, Index d, Index kraus, Index split) {
  if (d <= 0 || kraus <= 0) throw BadDims("random_invariant_map: dimensions must be positive");
  if (split < 0 || split >= d) throw BadDims("random_invariant_map: split must lie in [0, d)");
  const Index first = split > 0 ? split : d;
  const Vector delta_first = rng.unit_vector(first);
  Matrix w = Matrix::Zero(d * kraus, d * kraus);
  w.topLeftCorner(first * kraus, first * kraus) = random_fixing_unitary(rng, delta_first, kraus);
  if (split > 0) {
    const Index rest = (d - split) * kraus;
    w.bottomRightCorner(rest, rest) = rng.haar_unitary(rest);
  }
  Vector delta = Vector::Zero(d);
  delta.head(first) = delta_first;

  std::vector<Matrix> ops;
  for (Index i = 0; i < kraus; ++i) {
    Matrix a(d, d);
    for (Index r = 0; r < d; ++r) {
      for (Index s = 0; s < d; ++s) a(r, s) = w(r * kraus + i, s * kraus);
    }
    ops.push_back(a);
  }
  return {make_kraus_map(std::move(ops)), delta};
}

}  // namespace dilab
