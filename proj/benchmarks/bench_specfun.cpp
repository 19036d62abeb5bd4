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

#include "etn/specfun.hpp"

namespace {

std::vector<double> log_spaced(std::size_t n, double lo, double hi) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return xs;
}

void BM_Lgamma(benchmark::State& state) {
  const auto xs = log_spaced(1024, 0.1, 1e6);
  for (auto _ : state) {
    double acc = 0.0;
    for (double x : xs) acc += etn::specfun::lgamma(x);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Lgamma);

void BM_Digamma(benchmark::State& state) {
  const auto xs = log_spaced(1024, 0.1, 1e6);
  for (auto _ : state) {
    double acc = 0.0;
    for (double x : xs) acc += etn::specfun::digamma(x);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Digamma);

void BM_GammaPInverse(benchmark::State& state) {
  const double shape = static_cast<double>(state.range(0)) / 10.0;
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  std::vector<double> us(256);
  for (auto& v : us) v = u(eng);
  for (auto _ : state) {
    double acc = 0.0;
    for (double p : us) acc += etn::specfun::gamma_p_inverse(shape, p);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_GammaPInverse)->Arg(3)->Arg(10)->Arg(37)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
