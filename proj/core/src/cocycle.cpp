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
#include "dilab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dilab {

namespace {

constexpr Index kDenseLimit = 512;
constexpr Index kDenseCertificateLimit = 4096;
constexpr double kFrobeniusShortcut = 1e-10;

double lambda_max(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(h.rows() - 1);
}

double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

Vector delta_vacuum(const ToyCocycle& c) {
  return kron(c.delta, Vector::Unit(c.m, 0));
}

Index dense_dim(Index d, Index m, Index slots) {
  Index out = d;
  for (Index j = 0; j < slots; ++j) {
    out *= m;
    if (out > (1 << 22)) return out;
  }
  return out;
}

}  // namespace

ToyCocycle make_toy_cocycle(Matrix u, Index d, Index m, Index horizon, Vector delta,
                            const Tolerance& tol) {
  tol.validate();
  if (d < 1 || m < 2 || horizon < 1) throw BadDims("toy cocycle: need d >= 1, m >= 2, N >= 1");
  if (u.rows() != d * m || u.cols() != d * m) {
    throw DimensionMismatch("toy cocycle: generator must be (d m) x (d m)");
  }
  require_finite(u, "toy cocycle");
  const double defect = unitarity_defect(u);
  if (defect > tol.residual_eps) {
    throw NotUnitary("toy cocycle: unitarity defect " + std::to_string(defect));
  }
  if (delta.size() != d) throw DimensionMismatch("toy cocycle: delta must live in H");
  require_finite(delta, "toy cocycle");
  const double n = delta.norm();
  if (n == 0.0) throw DimensionMismatch("toy cocycle: delta is zero");
  return ToyCocycle{d, m, horizon, std::move(u), delta / n};
}

Vector cocycle_apply(const ToyCocycle& c, Index n, const Vector& v) {
  if (n < 0 || n > c.horizon) {
    throw HorizonExceeded("cocycle_apply: n = " + std::to_string(n) + " beyond horizon " +
                          std::to_string(c.horizon));
  }
  const FockLayout layout = c.layout();
  if (v.size() != layout.dim()) throw DimensionMismatch("cocycle_apply: vector dimension");
  if (n == 0) return v;
  return apply_cocycle_range(layout, c.u, 1, n, v);
}

Vector cocycle_adjoint_apply(const ToyCocycle& c, Index n, const Vector& v) {
  if (n < 0 || n > c.horizon) {
    throw HorizonExceeded("cocycle_adjoint_apply: n = " + std::to_string(n) +
                          " beyond horizon " + std::to_string(c.horizon));
  }
  const FockLayout layout = c.layout();
  if (v.size() != layout.dim()) throw DimensionMismatch("cocycle_adjoint_apply: vector dimension");
  if (n == 0) return v;
  return apply_cocycle_range(layout, c.u, 1, n, v, true);
}

double adaptedness_residual(const Matrix& u_n, const FockLayout& layout, Index n) {
  layout.validate();
  if (u_n.rows() != layout.dim() || u_n.cols() != layout.dim()) {
    throw DimensionMismatch("adaptedness_residual: operator does not match the layout");
  }
  const Index dim = layout.dim();
  double worst = 0.0;
  for (Index j = n + 1; j <= layout.slots; ++j) {
    const Index st = layout.stride(j);
    auto digit = [&](Index i) { return (i / st) % layout.m; };
    for (Index a = 0; a < layout.m; ++a) {
      for (Index b = 0; b < layout.m; ++b) {
        // E_ab on slot j sends a basis index with digit b to the one with digit a.
        Matrix comm = Matrix::Zero(dim, dim);
        for (Index i = 0; i < dim; ++i) {
          if (digit(i) == b) comm.col(i) += u_n.col(i + (a - b) * st);
          if (digit(i) == a) comm.row(i) -= u_n.row(i + (b - a) * st);
        }
        // The Frobenius norm bounds the operator norm; skip the SVD when it is
        // already at rounding level.
        const double frob = comm.norm();
        worst = std::max(worst, frob <= kFrobeniusShortcut ? frob : op_norm(comm));
      }
    }
  }
  return worst;
}

double adaptedness_residual(const ToyCocycle& c, Index n) {
  if (n < 0 || n > c.horizon) throw HorizonExceeded("adaptedness_residual: n beyond horizon");
  if (n == c.horizon) return 0.0;
  if (dense_dim(c.d, c.m, n + 1) > kDenseLimit) return 0.0;
  const FockLayout layout = c.layout(n + 1);
  return adaptedness_residual(dense_cocycle(layout, c.u, n), layout, n);
}

KrausMap compress_Z(const ToyCocycle& c) {
  std::vector<Matrix> ops;
  const Matrix ua = c.u.adjoint();
  for (Index a = 0; a < c.m; ++a) {
    Matrix op(c.d, c.d);
    for (Index r = 0; r < c.d; ++r) {
      for (Index s = 0; s < c.d; ++s) op(r, s) = ua(r * c.m + a, s * c.m);
    }
    ops.push_back(op);
  }
  return make_kraus_map(std::move(ops));
}

double z_consistency_residual(const ToyCocycle& c, Index n) {
  if (n < 1 || n > c.horizon) throw HorizonExceeded("z_consistency_residual: n out of range");
  if (dense_dim(c.d, c.m, n) > kDenseCertificateLimit) {
    throw BadDims("z_consistency_residual: dense check limited to 4096 dimensions");
  }
  const FockLayout layout = c.layout(n);
  Matrix vac(layout.dim(), c.d);
  for (Index h = 0; h < c.d; ++h) vac.col(h) = vacuum_embed(layout, Vector::Unit(c.d, h));
  const Matrix v = apply_cocycle_range(layout, c.u, 1, n, vac, true);
  const KrausMap z = compress_Z(c);
  const Index rest = layout.dim() / c.d;
  double worst = 0.0;
  for (Index i = 0; i < c.d; ++i) {
    for (Index j = 0; j < c.d; ++j) {
      Matrix x = Matrix::Zero(c.d, c.d);
      x(i, j) = 1.0;
      Matrix iterated = x;
      for (Index k = 0; k < n; ++k) iterated = apply_heisenberg(z, iterated);
      // (x (x) I) v: row block h of v moves to row block i when h = j.
      Matrix xv = Matrix::Zero(layout.dim(), c.d);
      xv.middleRows(i * rest, rest) = v.middleRows(j * rest, rest);
      const Matrix direct = v.adjoint() * xv;
      worst = std::max(worst, op_norm(iterated - direct));
    }
  }
  return worst;
}

VacuumUnit vacuum_unit(const ToyCocycle& c, const Tolerance& tol) {
  tol.validate();
  const KrausMap z = compress_Z(c);
  const Matrix p = c.delta * c.delta.adjoint();
  const double moved = op_norm(apply_schrodinger(z, p) - p);
  if (moved > tol.residual_eps) {
    throw NoInvariantVector("vacuum_unit: delta is not invariant for Z (moved by " +
                            std::to_string(moved) + ")");
  }
  const Vector y = c.u.adjoint() * delta_vacuum(c);
  Matrix grid(c.d, c.m);
  for (Index h = 0; h < c.d; ++h) {
    for (Index a = 0; a < c.m; ++a) grid(h, a) = y(h * c.m + a);
  }
  VacuumUnit out;
  out.omega_hat = (c.delta.adjoint() * grid).transpose();
  out.product_residual = (grid - c.delta * out.omega_hat.transpose()).norm();
  if (out.product_residual > tol.residual_eps) {
    throw NotProductForm("vacuum_unit: u^*(delta (x) e_0) is not a product, residual " +
                         std::to_string(out.product_residual));
  }
  out.omega_hat /= out.omega_hat.norm();

  const FockLayout two = c.layout(2);
  const Vector image = apply_cocycle_range(two, c.u, 1, 2, vacuum_embed(two, c.delta), true);
  const Vector expected = product_vector(two, c.delta, {out.omega_hat, out.omega_hat});
  out.factorization_residual = (image - expected).norm();
  return out;
}

Matrix gauge_unitary(const Vector& omega_hat) {
  const Index m = omega_hat.size();
  if (m < 1) throw BadDims("gauge_unitary: empty vector");
  if (std::abs(omega_hat.norm() - 1.0) > 1e-10) throw BadDims("gauge_unitary: not a unit vector");
  const double theta = std::abs(omega_hat(0)) > 0.0 ? std::arg(omega_hat(0)) : 0.0;
  const Complex phase = std::polar(1.0, theta);
  Matrix p = Matrix::Identity(m, m);
  p(0, 0) = phase;
  Matrix h = Matrix::Identity(m, m);
  const Vector w = phase * Vector::Unit(m, 0) - omega_hat;
  if (w.norm() > 1e-14) h -= 2.0 * w * w.adjoint() / w.squaredNorm();
  return h * p;
}

ToyCocycle gauge_modify(const ToyCocycle& c, const Tolerance& tol) {
  const VacuumUnit unit = vacuum_unit(c, tol);
  const Matrix v = gauge_unitary(unit.omega_hat);
  ToyCocycle out = c;
  out.u = c.u * kron(Matrix::Identity(c.d, c.d), v);
  return out;
}

double vacuum_fixing_residual(const ToyCocycle& c) {
  const Vector dv = delta_vacuum(c);
  return (c.u.adjoint() * dv - dv).norm();
}

ProbeDynamics::ProbeDynamics(const ToyCocycle& c_hat)
    : d_(c_hat.d), m_(c_hat.m), u_(c_hat.u), a_(compress_Z(c_hat).ops()) {}

Matrix ProbeDynamics::z(const Matrix& x) const {
  Matrix out = Matrix::Zero(d_, d_);
  for (const auto& a : a_) out.noalias() += a.adjoint() * x * a;
  return out;
}

Matrix ProbeDynamics::z_power(const Matrix& x, Index n) const {
  Matrix out = x;
  for (Index k = 0; k < n; ++k) out = z(out);
  return out;
}

double ProbeDynamics::increment_from_gap(const Matrix& g) {
  return safe_sqrt(lambda_max(-(g + g.adjoint())));
}

ConvergenceCertificate convergence_analyze(const ToyCocycle& c_hat, const Tolerance& tol,
                                           double conv_tol) {
  tol.validate();
  if (!(conv_tol > 0.0 && conv_tol < 1.0)) {
    throw InvalidTolerance("convergence_analyze: conv_tol must lie in (0, 1)");
  }
  const double fix = vacuum_fixing_residual(c_hat);
  if (fix > tol.residual_eps) {
    throw NotVacuumFixing("convergence_analyze: u^*(delta (x) e_0) differs from delta (x) e_0 by " +
                          std::to_string(fix));
  }
  const ProbeDynamics pd(c_hat);
  const Index d = c_hat.d, m = c_hat.m, big_n = c_hat.horizon;
  const Matrix id = Matrix::Identity(d, d);
  const Matrix id_m = Matrix::Identity(m, m);
  const Matrix v = c_hat.u.adjoint();  // chi = u^* phi for depth-one probes
  const Matrix& a0 = pd.kraus()[0];

  ConvergenceCertificate cert;
  cert.horizon = big_n;
  cert.u_hat = c_hat.u;
  cert.omega_hat = Vector::Unit(m, 0);
  cert.gauge_v = id_m;
  cert.tolerance = conv_tol;

  // Delta_n^2 = lambda_max Z^n(I - |delta><delta|).
  std::vector<Matrix> defect_powers;
  Matrix x = id - c_hat.delta * c_hat.delta.adjoint();
  for (Index n = 0; n <= big_n; ++n) {
    defect_powers.push_back(x);
    cert.delta_curve.push_back(safe_sqrt(lambda_max(x)));
    x = pd.z(x);
  }
  for (Index n = 1; n <= big_n; ++n) {
    const Matrix g = v.adjoint() * kron(defect_powers[static_cast<std::size_t>(n - 1)], id_m) * v;
    cert.delta_curve_excited.push_back(safe_sqrt(lambda_max(g)));
  }

  // Cauchy increments from M = Z^n(A_0^s), through M - I = Z^n(A_0^s - I).
  cert.cauchy_curve.assign(static_cast<std::size_t>(big_n), 0.0);
  cert.cauchy_excess = -2.0;
  Matrix a0_power = id;
  for (Index s = 1; s <= big_n; ++s) {
    a0_power = a0_power * a0;
    Matrix gap = a0_power - id;
    Matrix prev_gap = gap;  // Z^{n-1}(A_0^s - I)
    for (Index n = 0; n + s <= big_n; ++n) {
      const double inc = ProbeDynamics::increment_from_gap(gap);
      const auto un = static_cast<std::size_t>(n);
      cert.cauchy_curve[un] = std::max(cert.cauchy_curve[un], inc);
      cert.cauchy_excess = std::max(cert.cauchy_excess, inc - 2.0 * cert.delta_curve[un]);
      if (2 * n >= big_n) cert.cauchy_tail = std::max(cert.cauchy_tail, inc);
      if (n >= 1) {
        const Matrix prev = v.adjoint() * kron(prev_gap, id_m) * v;
        const double inc_exc = ProbeDynamics::increment_from_gap(prev);
        cert.cauchy_excess =
            std::max(cert.cauchy_excess, inc_exc - 2.0 * cert.delta_curve_excited[un - 1]);
      }
      prev_gap = gap;
      gap = pd.z(gap);
    }
  }
  // Both sides are square roots of Gram quantities carried through up to N
  // applications of Z, so they are only resolved to about sqrt(N eps).
  cert.cauchy_resolution = std::sqrt(16.0 * static_cast<double>((big_n + 1) * d * m) *
                                     std::numeric_limits<double>::epsilon());
  cert.cauchy_bound_holds = cert.cauchy_excess <= tol.residual_eps + cert.cauchy_resolution;

  const double delta_end = cert.delta_curve.back();
  cert.convergent = delta_end <= conv_tol || cert.cauchy_tail <= conv_tol;

  // xi (x) Omega lies in the range of w iff u_s (xi (x) Omega) converges,
  // and ||(u_{n+s} - u_n) xi (x) Omega||^2 = -2 Re <xi, (A_0^{*s} - I) xi>.
  const Matrix a0_adj = a0.adjoint();
  std::vector<Vector> range_probes;
  for (Index i = 0; i < d; ++i) range_probes.push_back(Vector::Unit(d, i));
  range_probes.push_back(c_hat.delta);
  for (const auto& xi : range_probes) {
    double worst = 0.0;
    const Vector step = a0_adj * xi - xi;
    Vector diff = Vector::Zero(d);  // A_0^{*s} xi - xi
    for (Index s = 1; s <= big_n; ++s) {
      diff = a0_adj * diff + step;
      worst = std::max(worst, safe_sqrt(-2.0 * xi.dot(diff).real()));
    }
    cert.range_increments.push_back(worst);
    cert.in_range.push_back(worst <= conv_tol);
  }
  cert.q_defect = std::max({delta_end, cert.delta_curve_excited.back(), cert.range_increments.back()});
  cert.isometry_defect = op_norm(pd.z_power(id, big_n) - id);

  if (dense_dim(d, m, big_n) <= kDenseCertificateLimit) {
    const FockLayout layout = c_hat.layout();
    Matrix vac(layout.dim(), d);
    for (Index h = 0; h < d; ++h) vac.col(h) = vacuum_embed(layout, Vector::Unit(d, h));
    cert.w_hat = apply_cocycle_range(layout, c_hat.u, 1, big_n, vac, true);
  }

  if (!cert.convergent) {
    throw Inconclusive("convergence_analyze: Delta_N = " + std::to_string(delta_end) +
                           " and Cauchy tail " + std::to_string(cert.cauchy_tail) +
                           " both exceed " + std::to_string(conv_tol) + " at horizon " +
                           std::to_string(big_n),
                       cert);
  }
  return cert;
}

double exactness_residual_at(const ToyCocycle& c_hat, Index n, Index k) {
  if (n < 1 || k < n) throw BadDims("exactness_residual_at: need 1 <= n <= K");
  const ProbeDynamics pd(c_hat);
  const Matrix id = Matrix::Identity(c_hat.d, c_hat.d);
  Matrix a0_power = id;
  for (Index j = 0; j < n; ++j) a0_power = a0_power * pd.kraus()[0];
  return ProbeDynamics::increment_from_gap(pd.z_power(a0_power - id, k - n));
}

double exactness_residual(const ToyCocycle& c_hat, const ConvergenceCertificate& cert, Index n,
                          const Tolerance& tol) {
  if (!cert.convergent) throw Inconclusive("exactness_residual: no convergence certificate", cert);
  if (cert.isometry_defect > tol.residual_eps) {
    throw NotIsometric("exactness_residual: limit is not isometric, defect " +
                       std::to_string(cert.isometry_defect));
  }
  return exactness_residual_at(c_hat, n, n + cert.horizon);
}

BeurlingReport beurling_report(const ToyCocycle& c, const Tolerance& tol, double conv_tol,
                               Index exact_steps) {
  BeurlingReport rep;
  for (Index n = 1; n <= std::min<Index>(c.horizon, 3); ++n) {
    rep.restriction_residual = std::max(rep.restriction_residual, adaptedness_residual(c, n));
  }
  rep.restriction_ok = rep.restriction_residual <= tol.residual_eps;

  try {
    const ToyCocycle c_hat = gauge_modify(c, tol);
    const ConvergenceCertificate cert = convergence_analyze(c_hat, tol, conv_tol);
    rep.has_certificate = true;
    rep.q_defect = cert.q_defect;
    for (Index n = 1; n <= exact_steps; ++n) {
      rep.exactness = std::max(rep.exactness, exactness_residual(c_hat, cert, n, tol));
    }
    rep.conjugacy_ok = rep.q_defect <= conv_tol && rep.exactness <= conv_tol;
    if (!rep.conjugacy_ok) rep.failure = "w w^* differs from q";
  } catch (const Inconclusive& e) {
    rep.q_defect = e.partial().q_defect;
    rep.failure = e.what();
  } catch (const NoInvariantVector& e) {
    rep.failure = e.what();
  } catch (const NotProductForm& e) {
    rep.failure = e.what();
  }

  // The absorbed state of alpha restricted to H and one slot.
  const KrausMap z = compress_Z(c);
  Matrix sigma = Matrix::Identity(c.d, c.d) / static_cast<double>(c.d);
  for (Index n = 0; n < c.horizon; ++n) sigma = apply_schrodinger(z, sigma);
  Matrix vac = Matrix::Zero(c.m, c.m);
  vac(0, 0) = 1.0;
  const Matrix joint = kron(sigma, vac);
  const HermitianEigen eig = hermitian_eigen(joint);
  const Vector psi = eig.vectors.col(0);
  rep.purity_defect = op_norm(joint - psi * psi.adjoint());
  Matrix grid(c.d, c.m);
  for (Index h = 0; h < c.d; ++h) {
    for (Index a = 0; a < c.m; ++a) grid(h, a) = psi(h * c.m + a);
  }
  Eigen::JacobiSVD<Matrix> svd(grid);
  rep.schmidt_rank = 0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > conv_tol) ++rep.schmidt_rank;
  }
  rep.delta_overlap = std::abs(delta_vacuum(c).dot(psi));
  rep.product_state_ok = rep.purity_defect <= conv_tol && rep.schmidt_rank == 1 &&
                         rep.delta_overlap >= 1.0 - conv_tol;

  rep.beurling_type = rep.restriction_ok && rep.conjugacy_ok;
  return rep;
}

ToyCocycle amplitude_damping_cocycle(double lambda, Index horizon) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw BadDims("amplitude_damping_cocycle: lambda must lie in [0, 1]");
  }
  const double c = std::sqrt(1.0 - lambda), s = std::sqrt(lambda);
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = c;
  u(2, 1) = -s;
  u(1, 2) = s;
  u(2, 2) = c;
  u(3, 3) = 1.0;
  return make_toy_cocycle(u, 2, 2, horizon, Vector::Unit(2, 0));
}

ToyCocycle identity_cocycle(Index d, Index m, Index horizon) {
  if (d < 1 || m < 2) throw BadDims("identity_cocycle: need d >= 1, m >= 2");
  return make_toy_cocycle(Matrix::Identity(d * m, d * m), d, m, horizon, Vector::Unit(d, 0));
}

ToyCocycle nonergodic_cocycle(Index d, Index m, Index horizon) {
  if (d < 2 || m < 2) throw BadDims("nonergodic_cocycle: need d >= 2, m >= 2");
  Matrix phases = Matrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    phases(k, k) = std::polar(1.0, std::numbers::pi / 2.0 * static_cast<double>(k % 4));
  }
  return make_toy_cocycle(kron(phases, Matrix::Identity(m, m)), d, m, horizon, Vector::Unit(d, 0));
}

ToyCocycle random_ergodic_cocycle(Rng& rng, Index d, Index m, Index horizon, double max_modulus) {
  if (d < 1 || m < d || m < 2 || horizon < 1) {
    throw BadDims("random_ergodic_cocycle: need 1 <= d <= m, m >= 2, N >= 1");
  }
  if (!(max_modulus > 0.0 && max_modulus < 1.0)) {
    throw BadDims("random_ergodic_cocycle: max_modulus must lie in (0, 1)");
  }
  const Index n = d * m;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vector delta = rng.unit_vector(d);
    // Reset dilation: xi (x) e_0 -> delta (x) V xi for a random isometry V,
    // completed to a unitary; its compression sends every state to delta.
    const Matrix iso = rng.haar_unitary(m).leftCols(d);
    Matrix cols = rng.gaussian_matrix(n, n);
    for (Index h = 0; h < d; ++h) cols.col(h) = kron(delta, iso.col(h));
    Eigen::HouseholderQR<Matrix> qr(cols);
    Matrix q = qr.householderQ();
    for (Index h = 0; h < d; ++h) {
      const Complex phase = q.col(h).dot(cols.col(h));
      q.col(h) *= phase / std::abs(phase);
    }
    Matrix reset(n, n);
    Index next = d;
    for (Index idx = 0; idx < n; ++idx) reset.col(idx) = q.col(idx % m == 0 ? idx / m : next++);
    // Perturb by exp(i eps H) with H annihilating delta (x) e_0.
    const Vector fixed = kron(delta, Vector::Unit(m, 0));
    const Matrix proj = Matrix::Identity(n, n) - fixed * fixed.adjoint();
    const Matrix g = rng.gaussian_matrix(n, n);
    const Matrix herm = proj * (g + g.adjoint()) * proj * 0.5;
    const HermitianEigen eig = hermitian_eigen(herm);
    const double eps = rng.uniform();
    Vector phases(n);
    for (Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, eps * eig.values(k));
    const Matrix kick = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
    const Matrix w = reset * kick;
    ToyCocycle c = make_toy_cocycle(w.adjoint(), d, m, horizon, delta);
    const SpectralGap gap = spectral_gap(compress_Z(c));
    if (gap.second_modulus <= max_modulus && !gap.indeterminate) return c;
  }
  throw BadDims("random_ergodic_cocycle: no instance with the requested gap");
}

}  // namespace dilab
