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

#include <vector>

#include "dilab/numeric.hpp"

namespace dilab {

/// Dense layout of H (x) (C^m)^{(x) slots}. H is the most significant factor,
/// then slot 1, slot 2, ...; level 0 of each slot is the vacuum.
struct FockLayout {
  Index d = 1;
  Index m = 2;
  Index slots = 0;

  Index dim() const;
  /// Stride of slot j (1-based); slot 0 stands for H.
  Index stride(Index slot) const;
  void validate() const;
};

/// xi (x) e_0 (x) ... (x) e_0.
Vector vacuum_embed(const FockLayout& layout, const Vector& xi);
/// h (x) s_1 (x) ... (x) s_slots.
Vector product_vector(const FockLayout& layout, const Vector& h, const std::vector<Vector>& slot_states);

/// Applies a (d m) x (d m) operator to H and slot j, index h * m + a.
Matrix apply_local(const FockLayout& layout, const Matrix& u, Index slot, const Matrix& cols);

/// I_H (x) ... (x) y (x) ... with y on slot j.
Matrix slot_operator(const FockLayout& layout, const Matrix& y, Index slot);

/// u_[first] u_[first+1] ... u_[last] applied to cols (u_[last] acts first);
/// with adjoint, u_[last]^* ... u_[first]^* (u_[first]^* acts first).
Matrix apply_cocycle_range(const FockLayout& layout, const Matrix& u, Index first, Index last,
                           const Matrix& cols, bool adjoint = false);

/// Dense u_[1] ... u_[n] on the layout.
Matrix dense_cocycle(const FockLayout& layout, const Matrix& u, Index n);

}  // namespace dilab
