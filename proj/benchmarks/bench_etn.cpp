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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "etn/etn.hpp"

namespace {

std::vector<etn::LogitRecord> records(std::size_t n, int d, int c) {
  std::mt19937_64 eng(7);
  std::normal_distribution<double> g;
  std::vector<etn::LogitRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].features.resize(static_cast<std::size_t>(d));
    out[i].logits.resize(static_cast<std::size_t>(c));
    for (auto& v : out[i].features) v = g(eng);
    for (auto& v : out[i].logits) v = 2.0 * g(eng);
    out[i].label = static_cast<int>(i % static_cast<std::size_t>(c));
  }
  return out;
}

etn::EtnModel model(etn::Family family, int d, int c) {
  etn::TrainConfig cfg;
  etn::EtnModel m = etn::make_model(family, etn::MlpSpec{d, 64, 2}, c, cfg);
  return m;
}

void BM_LossBatch(benchmark::State& state) {
  const auto family = static_cast<etn::Family>(state.range(0));
  const auto batch = records(64, 32, 4);
  const etn::EtnModel m = model(family, 32, 4);
  etn::RandomStream rng(1);
  for (auto _ : state) {
    auto r = etn::loss_batch(m, batch, 20, rng);
    benchmark::DoNotOptimize(r.loss.total);
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_LossBatch)->Arg(static_cast<int>(etn::Family::kScalar))
    ->Arg(static_cast<int>(etn::Family::kVector))->Arg(static_cast<int>(etn::Family::kMatrix));

void BM_InferAll(benchmark::State& state) {
  const auto recs = records(256, 32, 4);
  const etn::EtnModel m = model(etn::Family::kScalar, 32, 4);
  for (auto _ : state) {
    auto r = etn::infer_all(m, recs, 20, 3);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_InferAll);

}  // namespace

BENCHMARK_MAIN();
