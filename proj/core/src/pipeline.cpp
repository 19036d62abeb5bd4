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

#include "etn/pipeline.hpp"

#include "etn/error.hpp"

namespace etn::pipeline {
namespace {

std::vector<NamedPredictions> predict_ood_etn(const EtnModel& model,
                                              const std::vector<std::pair<std::string, LogitBundle>>& ood,
                                              int mc_samples, std::uint64_t seed) {
  std::vector<NamedPredictions> out;
  for (std::size_t k = 0; k < ood.size(); ++k) {
    const auto records = ood[k].second.records();
    out.push_back({ood[k].first,
                   infer_all(model, records, mc_samples,
                             RandomStream::derive_seed(seed, "eval.ood." + std::to_string(k)))});
  }
  return out;
}

}  // namespace

Prepared prepare(const SynthSpec& synth, const PretrainConfig& base) {
  const SynthData data = gen_synth(synth);
  TinyClassifier model = pretrain(data.pretrain, base);
  Prepared p{model, export_bundle(model, data.adapt, true), export_bundle(model, data.test, true),
             export_bundle(model, data.ood, false)};
  return p;
}

MetricsReport evaluate_etn(const EtnModel& model, const LogitBundle& id,
                           const std::vector<std::pair<std::string, LogitBundle>>& ood,
                           int mc_samples, std::uint64_t seed) {
  if (!id.has_labels()) fail(ErrorCategory::kInvalidArgument, "ID bundle must be labeled");
  const auto records = id.records();
  const auto preds = infer_all(model, records, mc_samples, RandomStream::derive_seed(seed, "eval.id"));
  const auto ood_preds = predict_ood_etn(model, ood, mc_samples, seed);
  MetricsReport r = build_report(records, preds, ood_preds);
  r.method = "etn";
  r.family = std::string(family_name(model.family()));
  r.seed = seed;
  return r;
}

MetricsReport evaluate_static(const StaticScaling& s, const std::string& method,
                              const LogitBundle& id,
                              const std::vector<std::pair<std::string, LogitBundle>>& ood) {
  if (!id.has_labels()) fail(ErrorCategory::kInvalidArgument, "ID bundle must be labeled");
  const auto records = id.records();
  const auto preds = predict_static_all(s, records);
  std::vector<NamedPredictions> ood_preds;
  for (const auto& [name, b] : ood) ood_preds.push_back({name, predict_static_all(s, b.records())});
  MetricsReport r = build_report(records, preds, ood_preds);
  r.method = method;
  r.family = "none";
  return r;
}

MetricsReport run_etn(const Prepared& data, const RunConfig& cfg, std::uint64_t seed,
                      EtnModel* trained, TrainResult* history) {
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const MlpSpec spec{static_cast<int>(data.adapt.feature_dim), cfg.hidden_dim, 2};
  EtnModel model = make_model(cfg.family, spec, static_cast<int>(data.adapt.num_classes), tc);
  const auto adapt = data.adapt.records();
  TrainResult tr = train(model, adapt, tc);
  MetricsReport r = evaluate_etn(model, data.test, {{"ood", data.ood}}, tc.mc_samples, seed);
  if (trained) *trained = model;
  if (history) *history = std::move(tr);
  return r;
}

}  // namespace etn::pipeline
