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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etn/etn.hpp"

namespace etn {

/// Higher score means predicted positive.
struct ScoredBinary {
  std::vector<double> scores;
  std::vector<int> labels;  // 0 or 1
};

enum class ScoreKind : std::uint8_t { kMp, kUm, kMi, kDe };
enum class Task : std::uint8_t { kConfidence, kOod };

std::string_view score_name(ScoreKind kind);  // "mp", "um", "mi", "de"

namespace metrics {

/// Average precision with ties grouped: precision and recall are taken only
/// at tie-group boundaries. Throws kInvalidArgument without positives.
double aupr(const ScoredBinary& data);

/// P(s+ > s-) + P(s+ = s-) / 2. Throws kInvalidArgument unless both classes
/// are present.
double auroc(const ScoredBinary& data);

/// +1 or -1: MI and DE are negated for OOD detection, everything else as-is.
int score_orientation(ScoreKind kind, Task task);

double score_value(const UncertaintyScores& s, ScoreKind kind);

}  // namespace metrics

struct MetricCell {
  double aupr = 0.0;
  std::optional<double> auroc;  // absent when one class is empty
};

struct OodCells {
  std::string name;
  std::map<std::string, MetricCell> cells;  // keyed by score name
};

struct MetricsReport {
  std::string method;            // "etn", "static", "identity"
  std::string family;            // variational family or "none"
  std::uint64_t seed = 0;
  std::size_t n_id = 0;
  std::vector<std::size_t> n_ood;
  double accuracy = 0.0;
  std::optional<double> base_accuracy;  // accuracy of argmax of the raw logits
  std::map<std::string, MetricCell> confidence;  // mp, um
  std::vector<OodCells> ood;                     // per OOD bundle
  std::map<std::string, MetricCell> ood_mean;    // simple mean over bundles
};

struct NamedPredictions {
  std::string name;
  std::vector<Inference> predictions;
};

/// Builds the report from ID predictions (labeled records) and any number of
/// OOD prediction sets. Throws kInvalidArgument on empty inputs.
MetricsReport build_report(std::span<const LogitRecord> id_records,
                           std::span<const Inference> id_predictions,
                           std::span<const NamedPredictions> ood);

namespace report {

/// Flat "key = value" lines, one per metric, sorted by key.
std::string to_text(const MetricsReport& r);

std::string to_json(const MetricsReport& r);
MetricsReport from_json(const std::string& text);  // throws kFormat

void write_json(const std::filesystem::path& path, const MetricsReport& r);
MetricsReport read_json(const std::filesystem::path& path);

}  // namespace report
}  // namespace etn
