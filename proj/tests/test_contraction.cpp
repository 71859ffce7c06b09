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

#include "dilab/contraction.hpp"
#include "support.hpp"

using namespace dilab;
using dilab::test::gap;
using dilab::test::mat;

namespace {

const double kHalfRoot3 = std::sqrt(3.0) / 2.0;

// [[T, D_*], [D, -T^* P_*]] in ambient coordinates, P_* the projection onto D_*.
Matrix ambient_rotation_oracle(const Matrix& t) {
  const Index n = t.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix d = test::oracle_sqrt(id - t.adjoint() * t);
  const Matrix ds = test::oracle_sqrt(id - t * t.adjoint());
  Matrix r(2 * n, 2 * n);
  r << t, ds, d, -t.adjoint();
  return r;
}

Matrix ambient_rotation(const DefectData& dd) {
  const Index n = dd.dim_h();
  Matrix left = Matrix::Zero(2 * n, n + dd.dim_defect());
  left.topLeftCorner(n, n).setIdentity();
  left.bottomRightCorner(n, dd.dim_defect()) = dd.basis_D;
  Matrix right = Matrix::Zero(2 * n, n + dd.dim_defect_star());
  right.topLeftCorner(n, n).setIdentity();
  right.bottomRightCorner(n, dd.dim_defect_star()) = dd.basis_Dstar;
  return left * dd.R * right.adjoint();
}

}  // namespace

TEST_CASE("validate_contraction examples") {
  CHECK(validate_contraction(Matrix::Zero(2, 2)).norm() == 0.0);
  CHECK(validate_contraction(mat({{0.5}})).norm() == doctest::Approx(0.5));
  try {
    validate_contraction(mat({{1.01}}));
    FAIL("expected NotAContraction");
  } catch (const NotAContraction& e) {
    CHECK(e.norm() == doctest::Approx(1.01));
  }
  CHECK_THROWS_AS(validate_contraction(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("defect_data at T = 0") {
  const DefectData dd = defect_data(validate_contraction(mat({{0.0}})));
  CHECK(gap(dd.D, mat({{1.0}})) < 1e-15);
  CHECK(gap(dd.D_star, mat({{1.0}})) < 1e-15);
  CHECK(gap(dd.R, mat({{0.0, 1.0}, {1.0, 0.0}})) < 1e-15);
}

TEST_CASE("defect_data at T = 1/2") {
  const DefectData dd = defect_data(validate_contraction(mat({{0.5}})));
  CHECK(gap(dd.D, mat({{kHalfRoot3}})) < 1e-15);
  CHECK(gap(dd.D_star, mat({{kHalfRoot3}})) < 1e-15);
  CHECK(gap(dd.R, mat({{0.5, kHalfRoot3}, {kHalfRoot3, -0.5}})) < 1e-15);
  CHECK(unitarity_defect(dd.R) < 1e-15);
}

TEST_CASE("defect_data of the nilpotent 2x2") {
  const Matrix t = mat({{0.0, 0.5}, {0.0, 0.0}});
  const DefectData dd = defect_data(validate_contraction(t));
  CHECK(gap(dd.D, mat({{1.0, 0.0}, {0.0, kHalfRoot3}})) < 1e-15);
  CHECK(gap(dd.D_star, mat({{kHalfRoot3, 0.0}, {0.0, 1.0}})) < 1e-15);
  CHECK(dd.dim_defect() == 2);
  CHECK(dd.dim_defect_star() == 2);
  CHECK(gap(ambient_rotation(dd), ambient_rotation_oracle(t)) < 1e-14);
}

TEST_CASE("defect_data of a unitary has trivial defect spaces") {
  Rng rng(3);
  const DefectData dd = defect_data(random_unitary_contraction(rng, 3));
  CHECK(dd.dim_defect() == 0);
  CHECK(dd.dim_defect_star() == 0);
  CHECK(unitarity_defect(dd.R) < 1e-13);
}

TEST_CASE("star_stability examples") {
  const StabilityReport zero = star_stability(validate_contraction(Matrix::Zero(2, 2)), 5);
  CHECK(zero.is_star_stable);
  REQUIRE(zero.power_decay.size() == 5);
  for (double p : zero.power_decay) CHECK(p == 0.0);

  const StabilityReport swap = star_stability(validate_contraction(mat({{0.0, 1.0}, {1.0, 0.0}})), 5);
  CHECK_FALSE(swap.is_star_stable);
  CHECK(swap.spectral_radius == doctest::Approx(1.0));

  const StabilityReport nil = star_stability(validate_contraction(mat({{0.0, 0.5}, {0.0, 0.0}})), 4);
  CHECK(nil.is_star_stable);
  CHECK(nil.power_decay[0] == doctest::Approx(0.5));
  CHECK(nil.power_decay[1] == 0.0);
}

TEST_CASE("rotation matrix is unitary and matches the block oracle") {
  const Tolerance tol;
  for (std::uint64_t k = 0; k < 500; ++k) {
    Rng rng = test::case_rng(1001, k);
    const Index n = 1 + static_cast<Index>(rng.next() % 6);
    const double margin = k % 3 == 0 ? 0.0 : rng.uniform();
    const DefectData dd = defect_data(random_contraction(rng, n, margin), tol);
    CHECK(unitarity_defect(dd.R) <= tol.residual_eps);
    const Matrix& t = dd.t();
    const Matrix id = Matrix::Identity(n, n);
    CHECK(op_norm(dd.D * dd.D - (id - t.adjoint() * t)) <= tol.residual_eps);
    CHECK(op_norm(dd.D_star * dd.D_star - (id - t * t.adjoint())) <= tol.residual_eps);
    CHECK(op_norm(dd.D * (t.adjoint() * t) - (t.adjoint() * t) * dd.D) <= tol.residual_eps);
    CHECK(op_norm(dd.D_star * (t * t.adjoint()) - (t * t.adjoint()) * dd.D_star) <= tol.residual_eps);
    CHECK(op_norm(t * dd.D - dd.D_star * t) <= tol.residual_eps);
    if (margin > 0.0) CHECK(gap(ambient_rotation(dd), ambient_rotation_oracle(t)) < 1e-10);
  }
}

TEST_CASE("star stability agrees with the power test") {
  // rho^400 must sit well below 1e-6, which caps rho near 0.95.
  for (std::uint64_t k = 0; k < 200; ++k) {
    Rng rng = test::case_rng(1002, k);
    const Index n = 1 + static_cast<Index>(rng.next() % 5);
    const bool unitary = k % 5 == 0;
    const Contraction t = unitary ? random_unitary_contraction(rng, n)
                                  : random_star_stable(rng, n, 0.2 + 0.75 * rng.uniform());
    const StabilityReport rep = star_stability(t, 400);
    CHECK(rep.is_star_stable == (rep.power_decay.back() < 1e-6));
    CHECK(rep.is_star_stable == !unitary);
    const Matrix direct = test::matrix_power(t.matrix().adjoint(), 7);
    CHECK(std::abs(rep.power_decay[6] - op_norm(direct)) < 1e-12);
  }
}

TEST_CASE("random generators respect their contracts") {
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    CHECK(random_contraction(rng, 4, 0.1).norm() <= 1.0 / 1.1 + 1e-12);
    CHECK(spectral_radius(random_star_stable(rng, 3, 0.9).matrix()) <= 0.9 + 1e-12);
  }
  CHECK_THROWS_AS(random_contraction(rng, 0), BadDims);
  CHECK_THROWS_AS(random_star_stable(rng, 2, 1.0), BadDims);
}
