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

#include <Eigen/SVD>

#include "dilab/cocycle.hpp"
#include "support.hpp"

using namespace dilab;
using dilab::test::gap;
using dilab::test::mat;
using dilab::test::vec;

namespace {

const double kRoot3 = std::sqrt(3.0);

double op(const Matrix& m) { return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(m).singularValues()(0); }

// The library reads these norms off Gram matrices, which are accurate to
// rounding in the squared value only.
bool same_norm(double got, double oracle) { return std::abs(got * got - oracle * oracle) < 1e-13; }

Index ipow(Index b, Index e) {
  Index r = 1;
  for (Index i = 0; i < e; ++i) r *= b;
  return r;
}

// u acting on H and slot j of H (x) (C^m)^{(x) slots}, built entry by entry.
Matrix local_oracle(const Matrix& u, Index d, Index m, Index slots, Index j) {
  const Index dim = d * ipow(m, slots);
  const Index st = ipow(m, slots - j);
  const Index hs = ipow(m, slots);
  Matrix out = Matrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const Index h = i / hs, a = (i / st) % m;
    const Index base = i - h * hs - a * st;
    for (Index h2 = 0; h2 < d; ++h2) {
      for (Index a2 = 0; a2 < m; ++a2) out(base + h2 * hs + a2 * st, i) = u(h2 * m + a2, h * m + a);
    }
  }
  return out;
}

// u_[first] ... u_[last]
Matrix product_oracle(const Matrix& u, Index d, Index m, Index slots, Index first, Index last) {
  Matrix out = Matrix::Identity(d * ipow(m, slots), d * ipow(m, slots));
  for (Index j = first; j <= last; ++j) out = out * local_oracle(u, d, m, slots, j);
  return out;
}

// columns xi (x) Omega for xi = e_0..e_{d-1}
Matrix vacuum_columns(Index d, Index m, Index slots) {
  const Index hs = ipow(m, slots);
  Matrix v = Matrix::Zero(d * hs, d);
  for (Index h = 0; h < d; ++h) v(h * hs, h) = 1.0;
  return v;
}

Matrix unit(Index m, Index a, Index b) {
  Matrix e = Matrix::Zero(m, m);
  e(a, b) = 1.0;
  return e;
}

Matrix swap_unitary(Index d) {
  Matrix s = Matrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  return s;
}

ToyCocycle small_random(std::uint64_t base, std::uint64_t k, Index horizon) {
  Rng rng = test::case_rng(base, k);
  const Index d = 1 + static_cast<Index>(k % 2);
  return random_ergodic_cocycle(rng, d, 2, horizon);
}

}  // namespace

TEST_CASE("cocycle products match the dense oracle") {
  {
    const ToyCocycle c = amplitude_damping_cocycle(0.75, 3);
    const Vector out = cocycle_apply(c, 2, Vector::Unit(16, 8));
    Vector expect = Vector::Zero(16);
    expect(8) = 0.25;          // |1> (x) vacuum
    expect(4) = kRoot3 / 4.0;  // excitation in slot 1
    expect(2) = kRoot3 / 2.0;  // excitation in slot 2
    CHECK((out - expect).norm() < 1e-15);
  }
  for (std::uint64_t k = 0; k < 10; ++k) {
    const ToyCocycle c = small_random(5001, k, 4);
    const FockLayout layout = c.layout();
    Rng rng = test::case_rng(5002, k);
    const Vector v = rng.unit_vector(layout.dim());
    for (Index n = 0; n <= 4; ++n) {
      const Matrix oracle = product_oracle(c.u, c.d, c.m, 4, 1, n);
      CHECK(gap(dense_cocycle(layout, c.u, n), oracle) < 1e-13);
      CHECK((cocycle_apply(c, n, v) - oracle * v).norm() < 1e-13);
      CHECK((cocycle_adjoint_apply(c, n, v) - oracle.adjoint() * v).norm() < 1e-13);
    }
    CHECK_THROWS_AS(cocycle_apply(c, 5, v), HorizonExceeded);
  }
}

TEST_CASE("cocycle identity u_{n+s} = u_n gamma_n(u_s)") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const ToyCocycle c = small_random(5003, k, 5);
    const FockLayout layout = c.layout();
    const Matrix id = Matrix::Identity(layout.dim(), layout.dim());
    for (Index n = 0; n <= 5; ++n) {
      for (Index s = 0; n + s <= 5; ++s) {
        const Matrix shifted = apply_cocycle_range(layout, c.u, n + 1, n + s, id);
        CHECK(gap(dense_cocycle(layout, c.u, n + s), dense_cocycle(layout, c.u, n) * shifted) < 1e-13);
      }
    }
  }
}

TEST_CASE("adaptedness matches the slot operator oracle") {
  const ToyCocycle c = small_random(5004, 1, 4);
  const FockLayout layout = c.layout();
  for (Index n = 0; n <= 3; ++n) {
    const Matrix un = dense_cocycle(layout, c.u, n);
    double oracle = 0.0;
    for (Index j = n + 1; j <= 4; ++j)
      for (Index a = 0; a < c.m; ++a)
        for (Index b = 0; b < c.m; ++b) {
          const Matrix s = slot_operator(layout, unit(c.m, a, b), j);
          oracle = std::max(oracle, op(un * s - s * un));
        }
    CHECK(oracle < 1e-12);
    CHECK(adaptedness_residual(un, layout, n) < 1e-12);
    CHECK(adaptedness_residual(c, n) < 1e-12);
  }

  // a dense unitary that touches every slot is not adapted
  Rng rng(5005);
  const Matrix w = rng.haar_unitary(layout.dim());
  double oracle = 0.0;
  for (Index j = 2; j <= 4; ++j)
    for (Index a = 0; a < c.m; ++a)
      for (Index b = 0; b < c.m; ++b) {
        const Matrix s = slot_operator(layout, unit(c.m, a, b), j);
        oracle = std::max(oracle, op(w * s - s * w));
      }
  const double got = adaptedness_residual(w, layout, 1);
  CHECK(got >= 0.1);
  CHECK(std::abs(got - oracle) < 1e-12);
}

TEST_CASE("compress_Z examples") {
  {
    const KrausMap z = compress_Z(identity_cocycle(2, 3, 2));
    Rng rng(1);
    const Matrix x = rng.gaussian_matrix(2, 2);
    CHECK(gap(apply_heisenberg(z, x), x) < 1e-15);
  }
  {
    const ToyCocycle c = make_toy_cocycle(swap_unitary(2), 2, 2, 2, vec({1.0, 0.0}));
    const KrausMap z = compress_Z(c);
    const Matrix x = mat({{0.3, 1.0}, {2.0, -4.0}});
    CHECK(gap(apply_heisenberg(z, x), 0.3 * Matrix::Identity(2, 2)) < 1e-15);
  }
  {
    const KrausMap z = compress_Z(amplitude_damping_cocycle(0.75, 2));
    REQUIRE(z.ops().size() == 2);
    CHECK(gap(z.ops()[0], mat({{1.0, 0.0}, {0.0, 0.5}})) < 1e-15);
    CHECK(gap(z.ops()[1], mat({{0.0, -kRoot3 / 2.0}, {0.0, 0.0}})) < 1e-15);
  }
}

TEST_CASE("compression agrees with the dense cocycle") {
  CHECK(z_consistency_residual(amplitude_damping_cocycle(0.75, 4), 4) < 1e-14);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const ToyCocycle c = small_random(5006, k, 4);
    for (Index n = 1; n <= 4; ++n) CHECK(z_consistency_residual(c, n) < 1e-12);
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_toy_cocycle(Matrix::Identity(4, 4), 2, 1, 2, vec({1.0, 0.0})), BadDims);
  CHECK_THROWS_AS(make_toy_cocycle(Matrix::Identity(4, 4), 2, 2, 0, vec({1.0, 0.0})), BadDims);
  CHECK_THROWS_AS(make_toy_cocycle(Matrix::Identity(6, 6), 2, 2, 2, vec({1.0, 0.0})), DimensionMismatch);
  CHECK_THROWS_AS(make_toy_cocycle(2.0 * Matrix::Identity(4, 4), 2, 2, 2, vec({1.0, 0.0})), NotUnitary);
  const ToyCocycle c = make_toy_cocycle(Matrix::Identity(4, 4), 2, 2, 2, vec({2.0, 0.0}));
  CHECK(std::abs(c.delta.norm() - 1.0) < 1e-15);
}

TEST_CASE("vacuum unit and gauge") {
  {
    // u = I (x) X moves the vacuum to e_1
    const Matrix x = mat({{0.0, 1.0}, {1.0, 0.0}});
    const ToyCocycle c = make_toy_cocycle(kron(Matrix::Identity(2, 2), x), 2, 2, 3, vec({1.0, 0.0}));
    const VacuumUnit vu = vacuum_unit(c);
    CHECK((vu.omega_hat - vec({0.0, 1.0})).norm() < 1e-15);
    CHECK(vu.product_residual < 1e-15);
    CHECK(vu.factorization_residual < 1e-14);
    CHECK(vacuum_fixing_residual(c) == doctest::Approx(std::sqrt(2.0)));
    const ToyCocycle fixed = gauge_modify(c);
    CHECK(vacuum_fixing_residual(fixed) < 1e-14);
    CHECK_NOTHROW(convergence_analyze(fixed));
    CHECK_THROWS_AS(convergence_analyze(c), NotVacuumFixing);
  }
  CHECK(gap(gauge_unitary(vec({1.0, 0.0, 0.0})), Matrix::Identity(3, 3)) < 1e-15);
  for (std::uint64_t k = 0; k < 50; ++k) {
    Rng rng = test::case_rng(5007, k);
    const Index m = 2 + static_cast<Index>(k % 3);
    const Vector w = rng.unit_vector(m);
    const Matrix v = gauge_unitary(w);
    CHECK(unitarity_defect(v) < 1e-13);
    CHECK((v.col(0) - w).norm() < 1e-13);
    // identity on the complement of span{e_0, w}
    Matrix basis(m, 2);
    basis << Vector::Unit(m, 0), w;
    const Matrix q = range_basis(basis);
    const Matrix off = Matrix::Identity(m, m) - q * q.adjoint();
    CHECK(gap(v * off, off) < 1e-13);
  }

  // gauge by a random unitary on C^m: the vacuum unit moves and gauging restores it
  for (std::uint64_t k = 0; k < 20; ++k) {
    const ToyCocycle c = small_random(5008, k, 4);
    Rng rng = test::case_rng(5009, k);
    const Matrix g = rng.haar_unitary(c.m);
    const ToyCocycle moved = make_toy_cocycle(c.u * kron(Matrix::Identity(c.d, c.d), g), c.d, c.m, 4, c.delta);
    const VacuumUnit vu = vacuum_unit(moved);
    CHECK(vu.product_residual < 1e-12);
    CHECK(vu.factorization_residual < 1e-12);
    CHECK(vacuum_fixing_residual(gauge_modify(moved)) < 1e-12);
  }
}

TEST_CASE("vacuum unit errors") {
  const ToyCocycle nonfix = make_toy_cocycle(swap_unitary(2), 2, 2, 2, vec({0.0, 1.0}));
  CHECK_THROWS_AS(vacuum_unit(nonfix), NoInvariantVector);
  // u^*(delta (x) e_0) entangled, so Z_* mixes |delta><delta|
  Matrix u = Matrix::Identity(4, 4);
  const double s = std::sqrt(0.5);
  u(0, 0) = s;
  u(0, 3) = s;
  u(3, 0) = -s;
  u(3, 3) = s;
  const ToyCocycle ent = make_toy_cocycle(u, 2, 2, 2, vec({1.0, 0.0}));
  CHECK_THROWS_AS(vacuum_unit(ent), NoInvariantVector);
}

TEST_CASE("amplitude damping convergence curves") {
  const ConvergenceCertificate cert = convergence_analyze(amplitude_damping_cocycle(0.75, 24));
  for (std::size_t n = 0; n <= 24; ++n) {
    CHECK(std::abs(cert.delta_curve[n] - std::pow(0.5, static_cast<double>(n))) < 1e-15);
  }
  CHECK(cert.cauchy_bound_holds);
  CHECK(cert.convergent);
  CHECK(cert.range_increments[0] < 1e-15);
  CHECK(cert.range_increments[1] == doctest::Approx(std::sqrt(2.0)));
  CHECK(cert.in_range[0]);
  CHECK_FALSE(cert.in_range[1]);
  CHECK(cert.q_defect <= 1e-6);
  CHECK(cert.isometry_defect < 1e-15);
  CHECK_THROWS_AS(convergence_analyze(amplitude_damping_cocycle(0.75, 10)), Inconclusive);
  try {
    convergence_analyze(amplitude_damping_cocycle(0.75, 10));
  } catch (const Inconclusive& e) {
    CHECK(e.partial().delta_curve.size() == 11);
  }
}

TEST_CASE("convergence curves match dense oracles") {
  const Index big_n = 5;
  std::vector<ToyCocycle> cases{amplitude_damping_cocycle(0.75, big_n)};
  for (std::uint64_t k = 0; k < 6; ++k) cases.push_back(gauge_modify(small_random(5010, k, big_n)));
  for (const ToyCocycle& c : cases) {
    ConvergenceCertificate cert;
    try {
      cert = convergence_analyze(c);
    } catch (const Inconclusive& e) {
      cert = e.partial();
    }
    const Matrix vac = vacuum_columns(c.d, c.m, big_n);
    const Index rest = ipow(c.m, big_n);
    const Matrix off = kron(Matrix::Identity(c.d, c.d) - c.delta * c.delta.adjoint(), Matrix::Identity(rest, rest));
    std::vector<Matrix> w;
    for (Index n = 0; n <= big_n; ++n) w.push_back(product_oracle(c.u, c.d, c.m, big_n, 1, n).adjoint() * vac);
    for (Index n = 0; n <= big_n; ++n) {
      CHECK(same_norm(cert.delta_curve[static_cast<std::size_t>(n)], op(off * w[static_cast<std::size_t>(n)])));
    }
    for (Index n = 0; n < big_n; ++n) {
      double sup = 0.0;
      for (Index s = 1; n + s <= big_n; ++s) sup = std::max(sup, op(w[static_cast<std::size_t>(n + s)] - w[static_cast<std::size_t>(n)]));
      CHECK(same_norm(cert.cauchy_curve[static_cast<std::size_t>(n)], sup));
      CHECK(sup <= 2.0 * cert.delta_curve[static_cast<std::size_t>(n)] + 1e-12);
    }
  }
}

TEST_CASE("exactness residual matches the dense oracle") {
  std::vector<ToyCocycle> cases{amplitude_damping_cocycle(0.75, 6)};
  for (std::uint64_t k = 0; k < 4; ++k) cases.push_back(gauge_modify(small_random(5011, k, 6)));
  for (const ToyCocycle& c : cases) {
    for (const auto& [n, k] : {std::pair<Index, Index>{1, 3}, {2, 3}, {2, 4}, {1, 5}}) {
      const Index slots = n + k;
      const Matrix vac = vacuum_columns(c.d, c.m, slots);
      const Matrix un = product_oracle(c.u, c.d, c.m, slots, 1, n);
      const Matrix uk = product_oracle(c.u, c.d, c.m, slots, 1, k);
      const Matrix shifted = product_oracle(c.u, c.d, c.m, slots, n + 1, n + k);
      const double oracle = op((un - uk * shifted.adjoint()) * vac);
      CHECK(same_norm(exactness_residual_at(c, n, k), oracle));
    }
  }
  const ToyCocycle ad = amplitude_damping_cocycle(0.75, 40);
  const ConvergenceCertificate cert = convergence_analyze(ad);
  for (Index n = 1; n <= 5; ++n) {
    const double r = exactness_residual(ad, cert, n);
    CHECK(r <= 1e-6);
    CHECK(r <= 2.0 * cert.delta_curve.back() + 1e-12);
  }
}

TEST_CASE("beurling reports on the engineered suite") {
  const BeurlingReport ad = beurling_report(amplitude_damping_cocycle(0.75, 40));
  CHECK(ad.restriction_ok);
  CHECK(ad.has_certificate);
  CHECK(ad.conjugacy_ok);
  CHECK(ad.product_state_ok);
  CHECK(ad.beurling_type);
  CHECK(ad.q_defect <= 1e-6);

  const BeurlingReport non = beurling_report(nonergodic_cocycle(2, 2, 24));
  CHECK(non.restriction_ok);
  CHECK_FALSE(non.beurling_type);
  CHECK_FALSE(non.failure.empty());

  const BeurlingReport id = beurling_report(identity_cocycle(2, 2, 24));
  CHECK_FALSE(id.beurling_type);
  CHECK(id.q_defect == doctest::Approx(1.0));
}

TEST_CASE("beurling type tracks ergodicity of the compression") {
  for (std::uint64_t k = 0; k < 50; ++k) {
    Rng rng = test::case_rng(5012, k);
    const Index d = 1 + static_cast<Index>(k % 3);
    const Index m = std::max<Index>(2, d);
    const ToyCocycle c = random_ergodic_cocycle(rng, d, m, 24);
    const BeurlingReport rep = beurling_report(c);
    const ErgodicityReport erg = equivalence_report(compress_Z(c), c.delta);
    CHECK(erg.is_ergodic);
    CHECK(rep.beurling_type == erg.is_ergodic);
    CHECK(rep.restriction_residual < 1e-12);
    const ConvergenceCertificate cert = convergence_analyze(gauge_modify(c));
    CHECK(cert.cauchy_bound_holds);
    CHECK(cert.isometry_defect < 1e-12);
  }
}
