// Copyright 2026 The hent Authors
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

#include "hent/filter.hpp"
#include "hent/scenario.hpp"
#include "hent/sweep.hpp"
#include "hent/trajectory.hpp"

#include <benchmark/benchmark.h>

namespace {

using hent::Execution;

Execution mode(const benchmark::State& st) {
  return st.range(0) ? Execution::Parallel : Execution::Serial;
}

void BM_JointHerald(benchmark::State& st) {
  hent::TransducerParams p;
  hent::JointHeraldOptions opt;
  opt.execution = mode(st);
  const double pulse = 3.0 / (1e-2 * hent::pump_photon_number(p, 1e-6));
  for (auto _ : st) {
    auto r = hent::herald_joint_pair(p, p, 1e-6, hent::Detuning::Blue, pulse, 2000, 7, opt);
    benchmark::DoNotOptimize(r.infidelity);
  }
  st.SetItemsProcessed(st.iterations() * 2000);
}
BENCHMARK(BM_JointHerald)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FilterTolerance(benchmark::State& st) {
  hent::FilterSpec spec;
  for (auto _ : st) {
    auto r = hent::tolerance_monte_carlo(spec, 1000, 1, mode(st));
    benchmark::DoNotOptimize(r.pass_fraction);
  }
  st.SetItemsProcessed(st.iterations() * 1000);
}
BENCHMARK(BM_FilterTolerance)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AnalyticSweep(benchmark::State& st) {
  hent::Scenario s;
  for (auto _ : st) {
    auto pts = hent::run_sweep(s, mode(st));
    benchmark::DoNotOptimize(pts.data());
  }
}
BENCHMARK(BM_AnalyticSweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
