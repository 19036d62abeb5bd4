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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etn/basemodel.hpp"
#include "etn/metrics.hpp"
#include "etn/run_config.hpp"
#include "etn/static_scaling.hpp"

namespace etn::pipeline {

/// Pretrained backbone outputs on the synthetic splits.
struct Prepared {
  TinyClassifier model;
  LogitBundle adapt;
  LogitBundle test;
  LogitBundle ood;  // unlabeled
};

/// gen_synth followed by pretraining on the pretrain split and export.
Prepared prepare(const SynthSpec& synth, const PretrainConfig& base);

MetricsReport evaluate_etn(const EtnModel& model, const LogitBundle& id,
                           const std::vector<std::pair<std::string, LogitBundle>>& ood,
                           int mc_samples, std::uint64_t seed);

MetricsReport evaluate_static(const StaticScaling& s, const std::string& method,
                              const LogitBundle& id,
                              const std::vector<std::pair<std::string, LogitBundle>>& ood);

/// Trains one ETN for `seed` on prepared data and returns its report.
MetricsReport run_etn(const Prepared& data, const RunConfig& cfg, std::uint64_t seed,
                      EtnModel* trained = nullptr, TrainResult* history = nullptr);

}  // namespace etn::pipeline
