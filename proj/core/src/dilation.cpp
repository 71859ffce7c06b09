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
#include "dilab/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dilab {

std::vector<Index> HardyLayout::level_dims(const DefectData& dd) const {
  std::vector<Index> dims(degree, dd.dim_defect());
  for (std::size_t n = 0; n < degree && n < star_levels; ++n) dims[n] = dd.dim_defect_star();
  return dims;
}

double DilationVector::squared_norm() const {
  double total = h.squaredNorm();
  for (const auto& a : levels) total += a.squaredNorm();
  return total;
}

double DilationVector::norm() const { return std::sqrt(squared_norm()); }

DilationVector zero_dilation_vector(const DefectData& dd, HardyLayout layout) {
  if (layout.degree == 0) throw BadDims("zero_dilation_vector: degree must be positive");
  if (layout.star_levels > layout.degree) {
    throw LevelMismatch("zero_dilation_vector: more star levels than levels");
  }
  DilationVector v;
  v.h = Vector::Zero(dd.dim_h());
  v.star_levels = layout.star_levels;
  for (Index dim : layout.level_dims(dd)) v.levels.push_back(Vector::Zero(dim));
  return v;
}

void check_conformance(const DefectData& dd, const DilationVector& v) {
  if (v.h.size() != dd.dim_h()) {
    throw LevelMismatch("dilation vector: h has dimension " + std::to_string(v.h.size()) +
                        ", expected " + std::to_string(dd.dim_h()));
  }
  if (v.star_levels > v.degree()) {
    throw LevelMismatch("dilation vector: more star levels than levels");
  }
  const auto dims = v.layout().level_dims(dd);
  for (std::size_t n = 0; n < dims.size(); ++n) {
    if (v.levels[n].size() != dims[n]) {
      throw LevelMismatch("dilation vector: level " + std::to_string(n) + " has dimension " +
                          std::to_string(v.levels[n].size()) + ", expected " +
                          std::to_string(dims[n]));
    }
  }
}

double distance(const DilationVector& a, const DilationVector& b) {
  if (a.degree() != b.degree() || a.star_levels != b.star_levels || a.h.size() != b.h.size()) {
    throw LevelMismatch("distance: layouts differ");
  }
  double total = (a.h - b.h).squaredNorm();
  for (std::size_t n = 0; n < a.degree(); ++n) {
    if (a.levels[n].size() != b.levels[n].size()) throw LevelMismatch("distance: layouts differ");
    total += (a.levels[n] - b.levels[n]).squaredNorm();
  }
  return std::sqrt(total);
}

std::size_t support_degree(const DilationVector& v, double eps) {
  std::size_t deg = v.degree();
  while (deg > 0 && v.levels[deg - 1].norm() <= eps) --deg;
  return deg;
}

DilationVector dilation_apply(const DefectData& dd, const DilationVector& v) {
  check_conformance(dd, v);
  if (v.star_levels != 0) throw LevelMismatch("dilation_apply: vector must live in H + H^2(D)");
  if (v.levels.back().norm() > dd.tol.rank_eps) {
    throw TruncationOverflow("dilation_apply: top coefficient nonzero, no headroom for the shift");
  }
  DilationVector out;
  out.star_levels = 0;
  out.h = dd.t() * v.h;
  out.levels.reserve(v.degree());
  out.levels.push_back(dd.basis_D.adjoint() * (dd.D * v.h));
  for (std::size_t n = 0; n + 1 < v.degree(); ++n) out.levels.push_back(v.levels[n]);
  return out;
}

DilationVector leg_apply(const DefectData& dd, std::size_t k, const DilationVector& v) {
  check_conformance(dd, v);
  if (k >= v.degree()) throw LevelMismatch("leg_apply: level index beyond truncation degree");
  if (v.star_levels != k + 1) {
    throw LevelMismatch("leg_apply: R_" + std::to_string(k) + " needs " + std::to_string(k + 1) +
                        " star levels, vector has " + std::to_string(v.star_levels));
  }
  const Index d = dd.dim_h();
  Vector in(d + dd.dim_defect_star());
  in << v.h, v.levels[k];
  const Vector res = dd.R * in;
  DilationVector out = v;
  out.h = res.head(d);
  out.levels[k] = res.tail(dd.dim_defect());
  out.star_levels = k;
  return out;
}

DilationVector leg_adjoint_apply(const DefectData& dd, std::size_t k, const DilationVector& v) {
  check_conformance(dd, v);
  if (k >= v.degree()) throw LevelMismatch("leg_adjoint_apply: level index beyond truncation degree");
  if (v.star_levels != k) {
    throw LevelMismatch("leg_adjoint_apply: R_" + std::to_string(k) + "^* needs " +
                        std::to_string(k) + " star levels, vector has " +
                        std::to_string(v.star_levels));
  }
  const Index d = dd.dim_h();
  Vector in(d + dd.dim_defect());
  in << v.h, v.levels[k];
  const Vector res = dd.R.adjoint() * in;
  DilationVector out = v;
  out.h = res.head(d);
  out.levels[k] = res.tail(dd.dim_defect_star());
  out.star_levels = k + 1;
  return out;
}

namespace {

void require_headroom(const DilationVector& v, std::size_t n, double eps, const char* where) {
  if (n >= v.degree() || support_degree(v, eps) + n > v.degree()) {
    throw TruncationOverflow(std::string(where) + ": " + std::to_string(n) +
                             " shifts exceed the truncation degree");
  }
}

DilationVector shifted(const DilationVector& v, std::size_t n, std::size_t star_levels,
                       Index star_dim) {
  DilationVector out;
  out.h = v.h;
  out.star_levels = star_levels;
  out.levels.resize(v.degree());
  for (std::size_t j = 0; j < v.degree(); ++j) {
    if (j < n) {
      out.levels[j] = Vector::Zero(j < star_levels ? star_dim : v.levels[0].size());
    } else {
      out.levels[j] = v.levels[j - n];
    }
  }
  return out;
}

}  // namespace

DilationVector power_closed_form(const DefectData& dd, std::size_t n, const DilationVector& v) {
  check_conformance(dd, v);
  if (v.star_levels != 0) throw LevelMismatch("power_closed_form: vector must live in H + H^2(D)");
  require_headroom(v, n, dd.tol.rank_eps, "power_closed_form");
  DilationVector out = shifted(v, n, 0, dd.dim_defect_star());
  // level j carries D T^{n-1-j} h
  Vector power_h = v.h;
  for (std::size_t step = 0; step < n; ++step) {
    out.levels[n - 1 - step] = dd.basis_D.adjoint() * (dd.D * power_h);
    power_h = dd.t() * power_h;
  }
  out.h = power_h;
  return out;
}

double power_factorization_residual(const DefectData& dd, std::size_t n, const DilationVector& v) {
  if (n == 0) throw BadDims("power_factorization_residual: n must be positive");
  check_conformance(dd, v);
  if (v.star_levels != 0) {
    throw LevelMismatch("power_factorization_residual: vector must live in H + H^2(D)");
  }
  require_headroom(v, n, dd.tol.rank_eps, "power_factorization_residual");

  DilationVector powered = v;
  for (std::size_t step = 0; step < n; ++step) powered = dilation_apply(dd, powered);

  // h + z^n f with the vacated levels 0..n-1 read as zero D_* coefficients.
  DilationVector legs = shifted(v, n, n, dd.dim_defect_star());
  for (std::size_t k = n; k-- > 0;) legs = leg_apply(dd, k, legs);

  const DilationVector closed = power_closed_form(dd, n, v);
  return std::max(distance(powered, legs), distance(powered, closed));
}

}  // namespace dilab
