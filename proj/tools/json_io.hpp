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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dilab/numeric.hpp"

namespace dilab::harness {

using Json = nlohmann::json;

/// Raised for malformed configs; the CLI maps it to exit status 2.
class ConfigError : public Error {
  using Error::Error;
};

// Complex numbers travel as [re, im]; a bare number is read as real.
Complex complex_from_json(const Json& j, const std::string& where);
Json complex_to_json(Complex z);

// Matrices are row-major nested lists of complex pairs.
Matrix matrix_from_json(const Json& j, const std::string& where);
Json matrix_to_json(const Matrix& m);

Vector vector_from_json(const Json& j, const std::string& where);
Json vector_to_json(const Vector& v);

/// A finite double as a number, otherwise the strings "inf", "-inf", "nan".
Json real_to_json(double x);
Json reals_to_json(const std::vector<double>& xs);

}  // namespace dilab::harness
