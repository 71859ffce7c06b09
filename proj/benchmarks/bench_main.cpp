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
#include <benchmark/benchmark.h>

#include "dilab/charfun.hpp"
#include "dilab/cocycle.hpp"
#include "dilab/contraction.hpp"
#include "dilab/cp_dynamics.hpp"

using namespace dilab;

static void BM_DefectData(benchmark::State& state) {
  Rng rng(1);
  const Contraction t = random_contraction(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(defect_data(t));
}
BENCHMARK(BM_DefectData)->Arg(2)->Arg(6)->Arg(16);

static void BM_ThetaEval(benchmark::State& state) {
  Rng rng(2);
  const DefectData dd = defect_data(random_star_stable(rng, state.range(0), 0.9));
  const CharacteristicFunction cf = theta_coefficients(dd);
  const Complex z = std::polar(1.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(theta_eval(cf, z));
  state.counters["degree"] = static_cast<double>(cf.degree());
}
BENCHMARK(BM_ThetaEval)->Arg(2)->Arg(4);

static void BM_LimitProduct(benchmark::State& state) {
  Rng rng(3);
  const DefectData dd = defect_data(random_star_stable(rng, 3, 0.9));
  DilationVector v = zero_dilation_vector(dd, {static_cast<std::size_t>(state.range(0)), 0});
  v.h = rng.unit_vector(3);
  for (auto _ : state) benchmark::DoNotOptimize(limit_product_What(dd, static_cast<std::size_t>(state.range(0)), v));
}
BENCHMARK(BM_LimitProduct)->Arg(50)->Arg(200);

static void BM_BeurlingResidual(benchmark::State& state) {
  Rng rng(4);
  const DefectData dd = defect_data(random_star_stable(rng, 2, 0.9));
  for (auto _ : state) benchmark::DoNotOptimize(beurling_residual(dd, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BeurlingResidual)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_EquivalenceReport(benchmark::State& state) {
  Rng rng(5);
  const InvariantInstance inst = random_invariant_map(rng, state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(equivalence_report(inst.map, inst.delta));
}
BENCHMARK(BM_EquivalenceReport)->Arg(2)->Arg(4)->Arg(8);

static void BM_BeurlingReportAmplitudeDamping(benchmark::State& state) {
  const ToyCocycle c = amplitude_damping_cocycle(0.75, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(beurling_report(c));
}
BENCHMARK(BM_BeurlingReportAmplitudeDamping)->Arg(24)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_DenseCocycle(benchmark::State& state) {
  const ToyCocycle c = amplitude_damping_cocycle(0.75, state.range(0));
  const FockLayout layout = c.layout();
  for (auto _ : state) benchmark::DoNotOptimize(dense_cocycle(layout, c.u, state.range(0)));
}
BENCHMARK(BM_DenseCocycle)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
