// Copyright 2026 The CINet Authors.
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

// Serial reference vs OpenMP likelihood kernels on benchmark-design data.
// Arguments are (N, K).

#include <benchmark/benchmark.h>

#include "cinet/likelihood.h"
#include "cinet/simulation.h"

namespace {

struct Fixture {
  cinet::SimulationDesign design;
  cinet::Dataset data;
};

Fixture Make(const benchmark::State& state) {
  Fixture f{cinet::BenchmarkDesign(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(1))),
            {}};
  f.data = cinet::SimulateReplicate(f.design, 1).data;
  return f;
}

void BM_LogLikelihoodSerial(benchmark::State& state) {
  const Fixture f = Make(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cinet::LogLikelihoodSerial(f.data, f.design.truth));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogLikelihoodParallel(benchmark::State& state) {
  const Fixture f = Make(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cinet::LogLikelihood(f.data, f.design.truth));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogLikelihoodWithGradient(benchmark::State& state) {
  const Fixture f = Make(state);
  Eigen::VectorXd gradient;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cinet::LogLikelihoodWithGradient(f.data, f.design.truth, gradient));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void Sizes(benchmark::internal::Benchmark* b) {
  for (int n : {100, 200, 1000}) b->Args({n, 2});
  b->Args({200, 4});
}

}  // namespace

BENCHMARK(BM_LogLikelihoodSerial)->Apply(Sizes)->UseRealTime();
BENCHMARK(BM_LogLikelihoodParallel)->Apply(Sizes)->UseRealTime();
BENCHMARK(BM_LogLikelihoodWithGradient)->Apply(Sizes)->UseRealTime();

BENCHMARK_MAIN();
