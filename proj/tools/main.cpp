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
// dilab <command> --config <path>... [--out <dir>] [--seed <int>] [--curves]
//
// Exit status: 0 all verdicts pass, 1 a verdict failed, 2 invalid input.
// Several --config paths run as a batch, concurrently, each writing to
// <out>/<config stem>/; the exit status is the worst one.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness.hpp"

namespace {

using namespace dilab::harness;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInvalid = 2;

struct Outcome {
  int code = kInvalid;
  std::string log;
};

Outcome run_one(const std::string& command, const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, bool curves) {
  Outcome out;
  std::ostringstream log;
  try {
    std::ifstream in(config_path);
    if (!in) {
      out.log = "error: cannot open config " + config_path + "\n";
      return out;
    }
    const Json j = Json::parse(in);
    const ExperimentConfig cfg = parse_config(j, command, seed);
    const auto start = std::chrono::steady_clock::now();
    const RunResult result = run(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_outputs(out_dir, result, curves, seconds);
    for (const auto& c : result.checks) {
      log << (c.pass ? "pass " : "FAIL ") << c.name;
      if (c.value) log << "  " << *c.value << " <= " << *c.threshold;
      if (!c.note.empty()) log << "  (" << c.note << ")";
      log << "\n";
    }
    log << "verdict: " << (result.pass() ? "pass" : "fail") << "\n";
    out.code = result.pass() ? kPass : kFail;
  } catch (const Json::exception& e) {
    log << "error: config: " << e.what() << "\n";
  } catch (const dilab::Error& e) {
    log << "error: " << e.what() << "\n";
  }
  out.log = log.str();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dilab: dilation and cocycle laboratory"};
  std::string command, out_dir = ".";
  std::vector<std::string> configs;
  std::uint64_t seed = 0;
  bool curves = false;
  app.add_option("command", command, "charfun, dilate, limit, beurling1, cpcheck, cocycle or thm42")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", configs, "JSON config file; repeat for a batch")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  app.add_flag("--curves", curves, "also write curves.csv");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInvalid;
  }
  const std::optional<std::uint64_t> seed_override =
      seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt;

  if (configs.size() == 1) {
    const Outcome o = run_one(command, configs.front(), out_dir, seed_override, curves);
    (o.code == kInvalid ? std::cerr : std::cout) << o.log;
    return o.code;
  }

  std::set<std::string> stems;
  for (const auto& path : configs) {
    if (!stems.insert(std::filesystem::path(path).stem().string()).second) {
      std::cerr << "error: batch configs must have distinct file names: " << path << "\n";
      return kInvalid;
    }
  }
  std::vector<std::future<Outcome>> jobs;
  for (const auto& path : configs) {
    const std::string dir = (std::filesystem::path(out_dir) / std::filesystem::path(path).stem()).string();
    jobs.push_back(std::async(std::launch::async, [&command, path, dir, seed_override, curves] {
      return run_one(command, path, dir, seed_override, curves);
    }));
  }
  int worst = kPass;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Outcome o = jobs[i].get();
    std::cout << "== " << configs[i] << "\n" << o.log;
    worst = std::max(worst, o.code);
  }
  return worst;
}
