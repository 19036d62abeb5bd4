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

#include "etn/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "etn/error.hpp"

namespace etn {

std::string_view score_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kMp: return "mp";
    case ScoreKind::kUm: return "um";
    case ScoreKind::kMi: return "mi";
    case ScoreKind::kDe: return "de";
  }
  return "unknown";
}

namespace metrics {
namespace {

void check(const ScoredBinary& d) {
  if (d.scores.size() != d.labels.size()) {
    fail(ErrorCategory::kDimension, "scores and labels differ in length");
  }
  for (int y : d.labels) {
    if (y != 0 && y != 1) fail(ErrorCategory::kInvalidArgument, "labels must be 0 or 1");
  }
}

std::vector<std::size_t> descending(const ScoredBinary& d) {
  std::vector<std::size_t> idx(d.scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return d.scores[a] > d.scores[b]; });
  return idx;
}

}  // namespace

double aupr(const ScoredBinary& data) {
  check(data);
  const std::size_t pos = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
  if (pos == 0) fail(ErrorCategory::kInvalidArgument, "aupr: no positive samples");
  const auto idx = descending(data);
  double ap = 0.0, recall_prev = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t j = k;
    while (j < idx.size() && data.scores[idx[j]] == data.scores[idx[k]]) {
      tp += static_cast<std::size_t>(data.labels[idx[j]]);
      ++j;
    }
    seen = j;
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    k = j;
  }
  return ap;
}

double auroc(const ScoredBinary& data) {
  check(data);
  const std::size_t pos = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
  const std::size_t neg = data.labels.size() - pos;
  if (pos == 0 || neg == 0) fail(ErrorCategory::kInvalidArgument, "auroc: need both classes");
  // Ascending sweep: every positive beats the negatives below its tie group
  // and gets half credit for negatives inside it.
  auto idx = descending(data);
  std::reverse(idx.begin(), idx.end());
  double wins = 0.0;
  std::size_t neg_below = 0;
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t j = k, p = 0, n = 0;
    while (j < idx.size() && data.scores[idx[j]] == data.scores[idx[k]]) {
      (data.labels[idx[j]] == 1 ? p : n) += 1;
      ++j;
    }
    wins += static_cast<double>(p) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(n));
    neg_below += n;
    k = j;
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

int score_orientation(ScoreKind kind, Task task) {
  if (task == Task::kOod && (kind == ScoreKind::kMi || kind == ScoreKind::kDe)) return -1;
  return 1;
}

double score_value(const UncertaintyScores& s, ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kMp: return s.mp;
    case ScoreKind::kUm: return s.um;
    case ScoreKind::kMi: return s.mi;
    case ScoreKind::kDe: return s.de;
  }
  return 0.0;
}

}  // namespace metrics

namespace {

MetricCell cell(const ScoredBinary& d) {
  MetricCell c;
  c.aupr = metrics::aupr(d);
  const auto pos = std::count(d.labels.begin(), d.labels.end(), 1);
  if (pos > 0 && static_cast<std::size_t>(pos) < d.labels.size()) c.auroc = metrics::auroc(d);
  return c;
}

constexpr ScoreKind kConfidenceScores[] = {ScoreKind::kMp, ScoreKind::kUm};
constexpr ScoreKind kOodScores[] = {ScoreKind::kMp, ScoreKind::kUm, ScoreKind::kMi, ScoreKind::kDe};

}  // namespace

MetricsReport build_report(std::span<const LogitRecord> id_records,
                           std::span<const Inference> id_predictions,
                           std::span<const NamedPredictions> ood) {
  if (id_records.empty()) fail(ErrorCategory::kInvalidArgument, "build_report: empty ID set");
  if (id_records.size() != id_predictions.size()) {
    fail(ErrorCategory::kDimension, "build_report: records and predictions differ in length");
  }
  MetricsReport r;
  r.n_id = id_records.size();
  std::vector<int> correct(id_records.size());
  std::size_t hits = 0, base_hits = 0;
  for (std::size_t i = 0; i < id_records.size(); ++i) {
    const int y = id_records[i].label;
    if (y < 0) fail(ErrorCategory::kInvalidArgument, "build_report: ID records must be labeled");
    correct[i] = static_cast<int>(id_predictions[i].p.argmax()) == y ? 1 : 0;
    hits += static_cast<std::size_t>(correct[i]);
    const auto& z = id_records[i].logits;
    if (std::max_element(z.begin(), z.end()) - z.begin() == y) ++base_hits;
  }
  r.accuracy = static_cast<double>(hits) / static_cast<double>(r.n_id);
  r.base_accuracy = static_cast<double>(base_hits) / static_cast<double>(r.n_id);

  // Confidence cells need at least one correct prediction for AUPR.
  if (hits > 0) {
    for (ScoreKind k : kConfidenceScores) {
      ScoredBinary d;
      d.labels = correct;
      for (const auto& p : id_predictions) {
        d.scores.push_back(metrics::score_orientation(k, Task::kConfidence) *
                           metrics::score_value(p.scores, k));
      }
      r.confidence[std::string(score_name(k))] = cell(d);
    }
  }

  for (const auto& set : ood) {
    if (set.predictions.empty()) {
      fail(ErrorCategory::kInvalidArgument, "build_report: empty OOD set '" + set.name + "'");
    }
    OodCells oc{set.name, {}};
    for (ScoreKind k : kOodScores) {
      const int sign = metrics::score_orientation(k, Task::kOod);
      ScoredBinary d;
      for (const auto& p : id_predictions) {
        d.scores.push_back(sign * metrics::score_value(p.scores, k));
        d.labels.push_back(1);
      }
      for (const auto& p : set.predictions) {
        d.scores.push_back(sign * metrics::score_value(p.scores, k));
        d.labels.push_back(0);
      }
      oc.cells[std::string(score_name(k))] = cell(d);
    }
    r.n_ood.push_back(set.predictions.size());
    r.ood.push_back(std::move(oc));
  }
  if (!r.ood.empty()) {
    for (ScoreKind k : kOodScores) {
      const std::string key(score_name(k));
      MetricCell mean;
      double auroc_sum = 0.0;
      for (const auto& oc : r.ood) {
        mean.aupr += oc.cells.at(key).aupr / static_cast<double>(r.ood.size());
        auroc_sum += oc.cells.at(key).auroc.value_or(0.0);
      }
      mean.auroc = auroc_sum / static_cast<double>(r.ood.size());
      r.ood_mean[key] = mean;
    }
  }
  return r;
}

}  // namespace etn
