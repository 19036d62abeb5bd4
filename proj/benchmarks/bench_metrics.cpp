// Copyright 2026 The ETN Authors
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

#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "etn/metrics.hpp"

namespace {

etn::ScoredBinary data(std::size_t n) {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u;
  etn::ScoredBinary d;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(eng() % 2);
    d.labels.push_back(y);
    d.scores.push_back(std::round(100.0 * (u(eng) + 0.3 * y)) / 100.0);
  }
  return d;
}

void BM_Aupr(benchmark::State& state) {
  const auto d = data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(etn::metrics::aupr(d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Aupr)->Arg(1000)->Arg(100000);

void BM_Auroc(benchmark::State& state) {
  const auto d = data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(etn::metrics::auroc(d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
