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

#include <cstdint>
#include <optional>
#include <random>

#include "dilab/numeric.hpp"

namespace dilab {

/// Seeded instance generator.
///
/// Stream discipline, fixed so instances can be reproduced from another
/// language:
///  - engine: MT19937-64 seeded with the 64-bit seed;
///  - uniform(): (next() >> 11) * 2^-53, a double in [0, 1);
///  - normal(): Box-Muller on u1 = 1 - uniform(), u2 = uniform(), returning
///    sqrt(-2 ln u1) cos(2 pi u2) and caching sqrt(-2 ln u1) sin(2 pi u2) for
///    the following call;
///  - complex_normal(): real part drawn before imaginary part, each N(0, 1/2);
///  - matrices are filled row by row.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Seed of the index-th independent substream of a base seed (SplitMix64 of
  /// seed + index).
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal();
  Complex complex_normal();

  Matrix gaussian_matrix(Index rows, Index cols);
  Vector gaussian_vector(Index n);
  Vector unit_vector(Index n);

  /// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
  /// of diag(R) moved into Q.
  Matrix haar_unitary(Index n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace dilab
