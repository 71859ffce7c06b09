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
#include <doctest.h>

#include "dilab/cp_dynamics.hpp"
#include "support.hpp"

using namespace dilab;
using dilab::test::gap;
using dilab::test::mat;
using dilab::test::vec;

namespace {

Vector vectorize(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix random_hermitian(Rng& rng, Index d) {
  const Matrix g = rng.gaussian_matrix(d, d);
  return (g + g.adjoint()) / 2.0;
}

Matrix random_density(Rng& rng, Index d) {
  const Matrix g = rng.gaussian_matrix(d, d);
  const Matrix p = g * g.adjoint();
  return p / p.trace().real();
}

}  // namespace

TEST_CASE("amplitude damping actions") {
  const KrausMap z = amplitude_damping(0.75);
  const Complex a(0.3, 0.0), b(-1.2, 0.0);
  CHECK(gap(apply_heisenberg(z, mat({{a, 0.0}, {0.0, b}})), mat({{a, 0.0}, {0.0, b / 4.0 + 3.0 * a / 4.0}})) < 1e-15);
  CHECK(gap(apply_schrodinger(z, mat({{0.0, 0.0}, {0.0, 1.0}})), mat({{0.75, 0.0}, {0.0, 0.25}})) < 1e-15);
  CHECK(gap(apply_heisenberg(z, Matrix::Identity(2, 2)), Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_kraus_map({mat({{0.5}})}), NotUnital);
  CHECK_THROWS_AS(make_kraus_map({mat({{1.0, 0.0}, {0.0, 1.0}}), mat({{0.0}})}), DimensionMismatch);
  CHECK_THROWS_AS(make_kraus_map({}), DimensionMismatch);
  CHECK_THROWS_AS(make_density_state(mat({{0.5, 0.0}, {0.0, 0.6}})), NotADensityState);
  CHECK_THROWS_AS(make_density_state(mat({{1.5, 0.0}, {0.0, -0.5}})), NotADensityState);
  CHECK_THROWS_AS(make_density_state(mat({{0.5, 1.0}, {0.0, 0.5}})), NotADensityState);
  CHECK_NOTHROW(make_density_state(mat({{0.5, 0.5}, {0.5, 0.5}})));
  const DensityState psi = vector_state(vec({1.0, Complex(0.0, 1.0)}));
  CHECK(gap(psi.rho(), mat({{0.5, Complex(0.0, -0.5)}, {Complex(0.0, 0.5), 0.5}})) < 1e-15);
  CHECK_THROWS_AS(absorbing_check(amplitude_damping(0.5), vec({0.0, 1.0})), NotInvariant);
}

TEST_CASE("transfer matrices act on column-major vec") {
  Rng rng(71);
  const InvariantInstance inst = random_invariant_map(rng, 3, 2);
  const Matrix x = rng.gaussian_matrix(3, 3);
  CHECK((heisenberg_transfer_matrix(inst.map) * vectorize(x) - vectorize(apply_heisenberg(inst.map, x))).norm() < 1e-13);
  CHECK((schrodinger_transfer_matrix(inst.map) * vectorize(x) - vectorize(apply_schrodinger(inst.map, x))).norm() < 1e-13);
}

TEST_CASE("fixed point spaces") {
  CHECK(fixed_point_space(amplitude_damping(0.75)).size() == 1);
  const std::vector<Matrix> diag = fixed_point_space(unitary_conjugation(mat({{1.0, 0.0}, {0.0, Complex(0.0, 1.0)}})));
  CHECK(diag.size() == 2);
  for (const Matrix& x : diag) CHECK(std::abs(x(0, 1)) + std::abs(x(1, 0)) < 1e-12);
  CHECK(fixed_point_space(unitary_conjugation(Matrix::Identity(3, 3))).size() == 9);
  const std::vector<Matrix> ad = fixed_point_space(amplitude_damping(0.4));
  const Matrix x = ad.front() / ad.front()(0, 0);
  CHECK(gap(x, Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("spectral gap and budget") {
  const SpectralGap g = spectral_gap(amplitude_damping(0.75));
  CHECK(g.second_modulus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.decay_modulus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(g.indeterminate);
  CHECK(default_iteration_budget(g, 1e-6) == 120);

  const SpectralGap rot = spectral_gap(unitary_conjugation(mat({{1.0, 0.0}, {0.0, Complex(0.0, 1.0)}})));
  CHECK(rot.second_modulus == doctest::Approx(1.0));
  CHECK(rot.decay_modulus == 0.0);
  CHECK(default_iteration_budget(rot, 1e-6) >= 10);

  SpectralGap slow;
  slow.decay_modulus = 1.0 - 1e-9;
  CHECK(default_iteration_budget(slow, 1e-6) == 20000);
}

TEST_CASE("probe states") {
  for (Index d = 1; d <= 4; ++d) {
    const std::vector<Matrix> probes = probe_states(d);
    CHECK(probes.size() == static_cast<std::size_t>(d * d + 1));
    for (const Matrix& p : probes) CHECK_NOTHROW(make_density_state(p));
  }
}

TEST_CASE("absorption examples") {
  const AbsorptionResult ad = absorbing_check(amplitude_damping(0.75), vec({1.0, 0.0}));
  CHECK(ad.absorbing);
  CHECK(ad.invariance_residual < 1e-15);
  REQUIRE(ad.curve.size() > 12);
  CHECK(ad.curve[12] / ad.curve[11] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(ad.curve.back() <= Tolerance{}.residual_eps);

  const AbsorptionResult rot =
      absorbing_check(unitary_conjugation(mat({{1.0, 0.0}, {0.0, Complex(0.0, 1.0)}})), vec({1.0, 0.0}), 50);
  CHECK_FALSE(rot.absorbing);
  for (double c : rot.curve) CHECK(c == doctest::Approx(2.0));

  const AbsorptionResult one = absorbing_check(unitary_conjugation(mat({{1.0}})), vec({1.0}));
  CHECK(one.absorbing);
}

TEST_CASE("equivalence examples") {
  const ErgodicityReport ad = equivalence_report(amplitude_damping(0.75), vec({1.0, 0.0}));
  CHECK(ad.is_ergodic);
  CHECK(ad.is_absorbing);
  CHECK(ad.agree);
  CHECK(ad.monotone);
  CHECK(ad.limit_is_identity);
  REQUIRE(ad.invariant_vector.has_value());
  CHECK(std::abs(std::abs((*ad.invariant_vector)(0)) - 1.0) < 1e-12);

  const ErgodicityReport rot =
      equivalence_report(unitary_conjugation(mat({{1.0, 0.0}, {0.0, Complex(0.0, 1.0)}})), vec({1.0, 0.0}));
  CHECK_FALSE(rot.is_ergodic);
  CHECK_FALSE(rot.is_absorbing);
  CHECK(rot.agree);
  CHECK(rot.fixed_space_dim == 2);
  CHECK_FALSE(rot.limit_is_identity);
}

TEST_CASE("random invariant maps: unitality, duality, invariance") {
  for (std::uint64_t k = 0; k < 100; ++k) {
    Rng rng = test::case_rng(4001, k);
    const Index d = 1 + static_cast<Index>(k % 4);
    const Index kraus = 1 + static_cast<Index>((k / 4) % 3);
    const InvariantInstance inst = random_invariant_map(rng, d, kraus);
    CHECK(std::abs(inst.delta.norm() - 1.0) < 1e-14);

    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& a : inst.map.ops()) sum += a.adjoint() * a;
    CHECK(gap(sum, Matrix::Identity(d, d)) < 1e-12);

    const Matrix x = random_hermitian(rng, d);
    const Matrix rho = random_density(rng, d);
    const Complex lhs = (apply_heisenberg(inst.map, x) * rho).trace();
    const Complex rhs = (x * apply_schrodinger(inst.map, rho)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(apply_schrodinger(inst.map, rho).trace() - 1.0) < 1e-12);

    const Matrix p = inst.delta * inst.delta.adjoint();
    CHECK(gap(apply_schrodinger(inst.map, p), p) < 1e-12);
  }
}

TEST_CASE("absorption and ergodicity agree on random instances") {
  std::size_t indeterminate = 0;
  for (std::uint64_t k = 0; k < 60; ++k) {
    Rng rng = test::case_rng(4002, k);
    const Index d = 2 + static_cast<Index>(k % 3);
    const Index split = (k % 4 == 3) ? 1 : 0;
    const InvariantInstance inst = random_invariant_map(rng, d, 2, split);
    const ErgodicityReport r = equivalence_report(inst.map, inst.delta);
    if (r.gap.indeterminate) {
      ++indeterminate;
      continue;
    }
    CHECK(r.agree);
    CHECK(r.is_ergodic == r.is_absorbing);
    CHECK(r.monotone);
    CHECK(r.is_ergodic == r.limit_is_identity);
    if (split > 0) CHECK_FALSE(r.is_ergodic);
  }
  CHECK(indeterminate < 10);
}

TEST_CASE("Heisenberg iterates of the projector increase") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    Rng rng = test::case_rng(4003, k);
    const InvariantInstance inst = random_invariant_map(rng, 3, 2);
    Matrix p = inst.delta * inst.delta.adjoint();
    for (int n = 0; n < 30; ++n) {
      const Matrix next = apply_heisenberg(inst.map, p);
      CHECK(hermitian_eigen(next - p).values.minCoeff() >= -1e-12);
      CHECK(hermitian_eigen(Matrix::Identity(3, 3) - next).values.minCoeff() >= -1e-12);
      p = next;
    }
  }
}
