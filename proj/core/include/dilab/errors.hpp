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

#include <stdexcept>
#include <string>

namespace dilab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTolerance : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class NonFiniteEntry : public Error { using Error::Error; };
class BadDims : public Error { using Error::Error; };

// numeric core
class NotHermitian : public Error { using Error::Error; };
class NotPSD : public Error { using Error::Error; };

// contractions and dilations
class NotAContraction : public Error {
 public:
  NotAContraction(const std::string& what, double norm) : Error(what), norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};
class TruncationOverflow : public Error { using Error::Error; };
class LevelMismatch : public Error { using Error::Error; };
class OutsideDisc : public Error { using Error::Error; };
class NotStarStable : public Error { using Error::Error; };

// CP maps
class NotUnital : public Error { using Error::Error; };
class NotADensityState : public Error { using Error::Error; };
class NotInvariant : public Error { using Error::Error; };
class EquivalenceViolation : public Error { using Error::Error; };

// cocycles
class NotUnitary : public Error { using Error::Error; };
class HorizonExceeded : public Error { using Error::Error; };
class NoInvariantVector : public Error { using Error::Error; };
class NotProductForm : public Error { using Error::Error; };
class NotVacuumFixing : public Error { using Error::Error; };
class NotIsometric : public Error { using Error::Error; };

}  // namespace dilab
