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
#include "dilab/fock.hpp"

#include <string>

namespace dilab {

Index FockLayout::dim() const {
  Index out = d;
  for (Index j = 0; j < slots; ++j) out *= m;
  return out;
}

Index FockLayout::stride(Index slot) const {
  Index out = 1;
  for (Index j = slot; j < slots; ++j) out *= m;
  return out;
}

void FockLayout::validate() const {
  if (d < 1 || m < 2 || slots < 0) {
    throw BadDims("fock layout: need d >= 1, m >= 2, slots >= 0");
  }
  double size = static_cast<double>(d);
  for (Index j = 0; j < slots; ++j) size *= static_cast<double>(m);
  if (size > 1 << 22) throw BadDims("fock layout: dense dimension too large");
}

Vector vacuum_embed(const FockLayout& layout, const Vector& xi) {
  layout.validate();
  if (xi.size() != layout.d) throw DimensionMismatch("vacuum_embed: xi has the wrong dimension");
  Vector out = Vector::Zero(layout.dim());
  const Index s = layout.stride(0);
  for (Index h = 0; h < layout.d; ++h) out(h * s) = xi(h);
  return out;
}

Vector product_vector(const FockLayout& layout, const Vector& h,
                      const std::vector<Vector>& slot_states) {
  layout.validate();
  if (h.size() != layout.d || static_cast<Index>(slot_states.size()) != layout.slots) {
    throw DimensionMismatch("product_vector: factor count or dimension mismatch");
  }
  Matrix out = h;
  for (const auto& s : slot_states) {
    if (s.size() != layout.m) throw DimensionMismatch("product_vector: slot state dimension");
    out = kron(out, s);
  }
  return out;
}

Matrix apply_local(const FockLayout& layout, const Matrix& u, Index slot, const Matrix& cols) {
  layout.validate();
  if (slot < 1 || slot > layout.slots) {
    throw HorizonExceeded("apply_local: slot " + std::to_string(slot) + " outside 1.." +
                          std::to_string(layout.slots));
  }
  const Index d = layout.d, m = layout.m;
  if (u.rows() != d * m || u.cols() != d * m) throw DimensionMismatch("apply_local: generator size");
  if (cols.rows() != layout.dim()) throw DimensionMismatch("apply_local: vector dimension");

  const Index sh = layout.stride(0);
  const Index sj = layout.stride(slot);
  Matrix out(cols.rows(), cols.cols());
  Matrix gathered(d * m, cols.cols());
  // rest runs over indices of the slots other than j: high part above slot j
  // and low part below it.
  for (Index high = 0; high < sh / (sj * m); ++high) {
    for (Index low = 0; low < sj; ++low) {
      const Index base = high * sj * m + low;
      for (Index h = 0; h < d; ++h) {
        for (Index a = 0; a < m; ++a) gathered.row(h * m + a) = cols.row(h * sh + a * sj + base);
      }
      const Matrix moved = u * gathered;
      for (Index h = 0; h < d; ++h) {
        for (Index a = 0; a < m; ++a) out.row(h * sh + a * sj + base) = moved.row(h * m + a);
      }
    }
  }
  return out;
}

Matrix slot_operator(const FockLayout& layout, const Matrix& y, Index slot) {
  layout.validate();
  if (slot < 1 || slot > layout.slots) throw HorizonExceeded("slot_operator: slot out of range");
  if (y.rows() != layout.m || y.cols() != layout.m) throw DimensionMismatch("slot_operator: size");
  Matrix out = Matrix::Identity(layout.d, layout.d);
  for (Index j = 1; j <= layout.slots; ++j) {
    out = kron(out, j == slot ? y : Matrix::Identity(layout.m, layout.m));
  }
  return out;
}

Matrix apply_cocycle_range(const FockLayout& layout, const Matrix& u, Index first, Index last,
                           const Matrix& cols, bool adjoint) {
  if (first < 1 || last > layout.slots) {
    throw HorizonExceeded("apply_cocycle_range: slots " + std::to_string(first) + ".." +
                          std::to_string(last) + " exceed horizon " + std::to_string(layout.slots));
  }
  Matrix out = cols;
  if (adjoint) {
    const Matrix ua = u.adjoint();
    for (Index j = first; j <= last; ++j) out = apply_local(layout, ua, j, out);
  } else {
    for (Index j = last; j >= first; --j) out = apply_local(layout, u, j, out);
  }
  return out;
}

Matrix dense_cocycle(const FockLayout& layout, const Matrix& u, Index n) {
  const Matrix id = Matrix::Identity(layout.dim(), layout.dim());
  if (n == 0) return id;
  return apply_cocycle_range(layout, u, 1, n, id);
}

}  // namespace dilab
