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
#include "dilab/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_star_stable(const DefectData& dd) {
  return spectral_radius(dd.t()) < 1.0 - dd.tol.rank_eps;
}

Vector ambient_D(const DefectData& dd, const Vector& a) { return dd.D * (dd.basis_D * a); }

}  // namespace

double PowerNormSeries::at(std::size_t m) const noexcept {
  if (norms.empty()) return 1.0;
  return m < norms.size() ? norms[m] : norms.back();
}

double PowerNormSeries::tail_sum(std::size_t m) const noexcept {
  const double p = at(m);
  if (p == 0.0) return 0.0;
  return p * sum_bound;
}

TruncationRule truncation_rule(const DefectData& dd, double target, std::size_t cap) {
  if (!(target > 0.0)) throw InvalidTolerance("truncation_rule: target must be positive");
  if (cap == 0) throw BadDims("truncation_rule: cap must be positive");
  TruncationRule rule;
  PowerNormSeries& s = rule.powers;
  const Matrix adj = dd.t().adjoint();
  Matrix power = Matrix::Identity(dd.dim_h(), dd.dim_h());
  double partial = 0.0;
  std::size_t scan = 0;
  for (std::size_t j = 0; j < cap; ++j) {
    const double p = op_norm(power);
    s.norms.push_back(p);
    if (!s.summable() && j >= 1 && p <= 0.5) s.sum_bound = partial / (1.0 - p);
    partial += p;
    if (s.summable()) {
      while (scan <= j && s.norms[scan] * s.sum_bound > target) ++scan;
      if (scan <= j) {
        rule.degree = scan + 1;
        rule.tail_bound = s.tail_sum(scan);
        rule.certified = true;
        return rule;
      }
    }
    power = adj * power;
  }
  rule.degree = cap;
  rule.tail_bound = s.summable() ? s.tail_sum(cap - 1) : kInf;
  return rule;
}

TruncationRule truncation_rule(const DefectData& dd) {
  return truncation_rule(dd, dd.tol.residual_eps / 10.0);
}

EmbeddingC embed_C(const DefectData& dd, const Vector& h, std::size_t degree) {
  if (degree == 0) throw BadDims("embed_C: degree must be positive");
  if (h.size() != dd.dim_h()) throw DimensionMismatch("embed_C: h has the wrong dimension");
  EmbeddingC out;
  out.levels.reserve(degree);
  const Matrix adj = dd.t().adjoint();
  const Matrix coeff = dd.basis_Dstar.adjoint() * dd.D_star;
  Vector x = h;
  Matrix power = Matrix::Identity(dd.dim_h(), dd.dim_h());
  for (std::size_t n = 0; n < degree; ++n) {
    out.levels.push_back(coeff * x);
    x = adj * x;
    power = adj * power;
  }
  out.truncation_loss = x.norm();
  const double rho = spectral_radius(dd.t());
  out.star_stable = rho < 1.0 - dd.tol.rank_eps;
  out.tail_bound = out.star_stable ? op_norm(power) * h.norm() / (1.0 - rho) : kInf;
  return out;
}

CharacteristicFunction theta_coefficients(const DefectData& dd, std::size_t degree) {
  if (degree == 0) throw BadDims("theta_coefficients: degree must be positive");
  CharacteristicFunction cf;
  cf.rank_eps = dd.tol.rank_eps;
  cf.coeffs.reserve(degree);
  cf.coeffs.push_back(-dd.basis_Dstar.adjoint() * dd.t() * dd.basis_D);
  const Matrix adj = dd.t().adjoint();
  const Matrix left = dd.basis_Dstar.adjoint() * dd.D_star;
  Matrix right = dd.D * dd.basis_D;
  for (std::size_t n = 1; n < degree; ++n) {
    cf.coeffs.push_back(left * right);
    right = adj * right;
  }
  cf.star_stable = is_star_stable(dd);
  if (cf.star_stable) {
    const TruncationRule rule = truncation_rule(dd, dd.tol.residual_eps / 10.0);
    cf.tail_bound = rule.powers.tail_sum(degree - 1);
  }
  return cf;
}

CharacteristicFunction theta_coefficients(const DefectData& dd) {
  return theta_coefficients(dd, truncation_rule(dd).degree);
}

ThetaValue theta_eval(const CharacteristicFunction& cf, Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw NonFiniteEntry("theta_eval: z is not finite");
  }
  const double r = std::abs(z);
  if (r > 1.0 + cf.rank_eps) throw OutsideDisc("theta_eval: |z| = " + std::to_string(r) + " > 1");
  if (r >= 1.0 - cf.rank_eps && !cf.star_stable) {
    throw NotStarStable("theta_eval: boundary value needs a *-stable contraction");
  }
  if (cf.coeffs.empty()) throw BadDims("theta_eval: no coefficients");
  ThetaValue out;
  out.value = cf.coeffs.back();
  for (std::size_t n = cf.coeffs.size() - 1; n-- > 0;) out.value = out.value * z + cf.coeffs[n];
  double tail = cf.tail_bound;
  if (r < 1.0) tail = std::min(tail, std::pow(r, static_cast<double>(cf.degree())) / (1.0 - r));
  out.tail_bound = tail;
  return out;
}

double ModelImage::squared_norm() const {
  double total = 0.0;
  for (const auto& a : levels) total += a.squaredNorm();
  return total;
}

ModelImage model_map_W(const DefectData& dd, const DilationVector& v, std::size_t n_out) {
  check_conformance(dd, v);
  if (v.star_levels != 0) throw LevelMismatch("model_map_W: vector must live in H + H^2(D)");
  if (n_out < v.degree()) {
    throw TruncationOverflow("model_map_W: output degree " + std::to_string(n_out) +
                             " below input degree " + std::to_string(v.degree()));
  }
  const EmbeddingC c = embed_C(dd, v.h, n_out);
  const CharacteristicFunction cf = theta_coefficients(dd, n_out);
  ModelImage out;
  out.levels = c.levels;
  const std::size_t deg = support_degree(v, 0.0);
  for (std::size_t m = 0; m < n_out; ++m) {
    for (std::size_t k = 0; k <= m && k < deg; ++k) out.levels[m] += cf.coeffs[m - k] * v.levels[k];
  }
  double tail = c.star_stable ? c.truncation_loss : kInf;
  if (deg > 0) {
    const TruncationRule rule = truncation_rule(dd, dd.tol.residual_eps / 10.0);
    for (std::size_t k = 0; k < deg; ++k) {
      tail += v.levels[k].norm() * rule.powers.tail_sum(n_out - k - 1);
    }
  }
  out.tail_bound = tail;
  return out;
}

double intertwining_residual(const DefectData& dd, const DilationVector& v, std::size_t n_out) {
  const DilationVector uv = dilation_apply(dd, v);
  const ModelImage wuv = model_map_W(dd, uv, n_out);
  const ModelImage wv = model_map_W(dd, v, n_out);
  double total = wuv.levels[0].squaredNorm();
  for (std::size_t m = 1; m < n_out; ++m) total += (wuv.levels[m] - wv.levels[m - 1]).squaredNorm();
  return std::sqrt(total);
}

LimitResult limit_product_What(const DefectData& dd, std::size_t steps, const DilationVector& v) {
  if (steps == 0) throw BadDims("limit_product_What: steps must be positive");
  check_conformance(dd, v);
  if (v.star_levels != 0) throw LevelMismatch("limit_product_What: vector must live in H + H^2(D)");
  if (steps > v.degree()) {
    throw TruncationOverflow("limit_product_What: " + std::to_string(steps) +
                             " steps exceed the truncation degree " + std::to_string(v.degree()));
  }
  const bool stable = is_star_stable(dd);
  const TruncationRule rule = truncation_rule(dd, dd.tol.residual_eps / 10.0);
  const std::size_t n_ref = v.degree() + rule.degree;
  const ModelImage wv = model_map_W(dd, v, n_ref);

  LimitResult out;
  out.support_degree = support_degree(v, 0.0);
  out.reference_tail = wv.tail_bound;

  // suffix sums of ||(Wv)_k||^2 and ||a_k||^2
  std::vector<double> w_suffix(n_ref + 1, 0.0), a_suffix(v.degree() + 1, 0.0);
  for (std::size_t k = n_ref; k-- > 0;) w_suffix[k] = w_suffix[k + 1] + wv.levels[k].squaredNorm();
  for (std::size_t k = v.degree(); k-- > 0;) a_suffix[k] = a_suffix[k + 1] + v.levels[k].squaredNorm();

  const Matrix adj = dd.t().adjoint();
  const double v_norm = v.norm();
  DilationVector w = v;
  Vector h_closed = v.h;
  Matrix tail_power = Matrix::Identity(dd.dim_h(), dd.dim_h());
  double lead_error = 0.0;  // sum_{k<n} ||b_k - (Wv)_k||^2
  out.bound_holds = true;
  for (std::size_t n = 1; n <= steps; ++n) {
    w = leg_adjoint_apply(dd, n - 1, w);
    lead_error += (w.levels[n - 1] - wv.levels[n - 1]).squaredNorm();

    h_closed = adj * h_closed + ambient_D(dd, v.levels[n - 1]);
    double closed_gap = (w.h - h_closed).squaredNorm();
    closed_gap += (w.levels[n - 1] - wv.levels[n - 1]).squaredNorm();
    out.induction_residual = std::max(out.induction_residual, std::sqrt(closed_gap));

    const double err = std::sqrt(w.h.squaredNorm() + lead_error + w_suffix[n] + a_suffix[n]);
    out.h_norms.push_back(w.h.norm());
    out.errors.push_back(err);

    double p = 1.0;
    if (n > out.support_degree) {
      tail_power = adj * tail_power;
      p = op_norm(tail_power);
      if (p >= 1e-12 && err > out.constant * p * v_norm + 1e-12 + out.reference_tail) {
        out.bound_holds = false;
      }
    }
    out.power_norms.push_back(p);
  }
  out.final_vector = std::move(w);
  out.converged = stable && out.errors.back() <= dd.tol.residual_eps;
  return out;
}

BeurlingResult beurling_residual(const DefectData& dd, std::size_t degree, std::size_t low_degree) {
  if (!is_star_stable(dd)) throw NotStarStable("beurling_residual: spectral radius is not below 1");
  if (degree < 2) throw BadDims("beurling_residual: degree must be at least 2");
  if (low_degree == 0) low_degree = degree / 2;
  if (low_degree > degree) throw BadDims("beurling_residual: low degree exceeds degree");

  const Index ks = dd.dim_defect_star();
  const Index k = dd.dim_defect();
  const Index d = dd.dim_h();
  const Index n = static_cast<Index>(degree);
  const Index l = static_cast<Index>(low_degree);

  Matrix c_cols = Matrix::Zero(n * ks, d);
  for (Index i = 0; i < d; ++i) {
    const EmbeddingC c = embed_C(dd, Vector::Unit(d, i), degree);
    for (Index m = 0; m < n; ++m) c_cols.block(m * ks, i, ks, 1) = c.levels[m];
  }
  const CharacteristicFunction cf = theta_coefficients(dd, degree);
  Matrix theta_cols = Matrix::Zero(n * ks, l * k);
  for (Index j = 0; j < l; ++j) {
    for (Index m = j; m < n; ++m) {
      theta_cols.block(m * ks, j * k, ks, k) = cf.coeffs[static_cast<std::size_t>(m - j)];
    }
  }
  const Matrix q_c = range_basis(c_cols, dd.tol);
  const Matrix q_t = range_basis(theta_cols, dd.tol);

  const Matrix e_low = Matrix::Identity(n * ks, l * ks);
  const Matrix rest = e_low - q_c * (q_c.adjoint() * e_low) - q_t * (q_t.adjoint() * e_low);

  BeurlingResult out;
  out.residual = op_norm(rest);
  const RealVector cosines = principal_angle_cosines(q_c, q_t);
  out.cross_cosine = cosines.size() > 0 ? cosines.maxCoeff() : 0.0;
  const TruncationRule rule = truncation_rule(dd, dd.tol.residual_eps / 10.0);
  out.tail_bound = rule.powers.tail_sum(degree - low_degree);
  out.degree = degree;
  out.low_degree = low_degree;
  return out;
}

}  // namespace dilab
