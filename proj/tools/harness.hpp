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
#include <string>
#include <vector>

#include "dilab/cocycle.hpp"
#include "dilab/contraction.hpp"
#include "dilab/cp_dynamics.hpp"
#include "json_io.hpp"

namespace dilab::harness {

inline const std::vector<std::string> kCommands = {"charfun",  "dilate", "limit", "beurling1",
                                                   "cpcheck", "cocycle", "thm42"};
inline const std::vector<std::string> kInstanceKinds = {
    "random_contraction", "star_stable",       "unitary",           "amplitude_damping",
    "random_cocycle",     "nonergodic_cocycle", "identity_cocycle", "explicit"};

/// Zero means "use the command default".
struct Dims {
  Index d_h = 2;
  Index m = 2;
  Index horizon = 0;
  Index degree = 0;
};

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  Dims dims;
  Tolerance tol;
  double conv_tol = 1e-6;
  std::string kind;
  double lambda = 0.75;
  /// Explicit instance data ("T", "u" with "delta", or "kraus" with "delta").
  Json explicit_instance;
  /// Command-specific knobs: steps, points, low_degree.
  Json params = Json::object();
};

/// Validates the JSON config. The command comes from the command line; a
/// "command" entry in the file must agree with it. A seed passed on the
/// command line overrides the file.
ExperimentConfig parse_config(const Json& j, const std::string& command,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

/// Canonical echo of a parsed config.
Json config_to_json(const ExperimentConfig& cfg);

struct Instance {
  std::string kind;
  std::optional<Contraction> contraction;
  std::optional<ToyCocycle> cocycle;
  std::optional<KrausMap> kraus;
  std::optional<Vector> delta;
  Json echo;
};

/// Deterministic instance from kind, seed and dims. Throws BadDims when the
/// dimensions do not suit the kind.
Instance generate_instance(const std::string& kind, std::uint64_t seed, const Dims& dims,
                           double lambda = 0.75, const Json& explicit_instance = Json());

/// A verdict. Residual checks carry value <= threshold; flag checks carry
/// neither.
struct Check {
  std::string name;
  bool pass = false;
  std::optional<double> value;
  std::optional<double> threshold;
  std::string note;
};

struct CurveRow {
  std::size_t step = 0;
  std::string quantity;
  double value = 0.0;
};

struct RunResult {
  Json report;
  std::vector<Check> checks;
  std::vector<CurveRow> curves;
  bool pass() const;
};

/// Runs one experiment. Precondition failures surface as dilab::Error.
RunResult run(const ExperimentConfig& cfg);

std::string report_text(const RunResult& result);
std::string curves_csv(const std::vector<CurveRow>& rows);

/// Writes report.json, timing.json and, if requested, curves.csv.
void write_outputs(const std::string& dir, const RunResult& result, bool curves, double seconds);

}  // namespace dilab::harness
