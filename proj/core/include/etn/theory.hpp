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
#include <span>
#include <string>
#include <vector>

#include "etn/basemodel.hpp"

namespace etn::theory {

struct Prop1Result {
  double ce_bounded = 0.0;
  double alpha0_bounded = 0.0;
  double ce_diverging = 0.0;
  double alpha0_diverging = 0.0;
};

/// Label y = 0. Bounded: z = (0, -t, ..., -t). Diverging: z = (t, 0, ..., 0).
/// b has length C.
Prop1Result prop1_constructions(int num_classes, double t, std::span<const double> b);

struct MarginBoundParams {
  double nu = 1e4;
  double b_y = 1.0;
  double eta = 0.0;  // 0 <= eta < nu - b_y
  int num_classes = 2;
  double loss = 0.0;

  void validate() const;  // throws kInvalidArgument
};

/// softplus_inv(nu - b_y - eta) - softplus_inv(eta); requires eta > 0.
double edl_margin_lower_bound(const MarginBoundParams& p);

/// log(1 + (C - 1)(e^eta - 1) / (e^(nu - b_y - eta) - 1)), evaluated in the
/// log domain so nu around 1e4 does not overflow.
double corollary1_threshold(const MarginBoundParams& p);

/// Largest CE margin compatible with loss L: solves log(1 + (C-1) e^-g) = L.
double implied_ce_margin(double loss, int num_classes);

struct Quantiles {
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};

Quantiles quantiles(std::vector<double> values);  // linear interpolation

struct MarginHistogram {
  static constexpr int kBins = 64;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> ce_counts;
  std::vector<std::size_t> edl_counts;
  Quantiles ce;
  Quantiles edl;
};

/// 64 uniform bins over the pooled range of both margin sets.
MarginHistogram margin_histogram(std::span<const double> ce_margins, std::span<const double> edl_margins);

/// Training-set margins under both models. Throws kInvalidArgument on empty data.
MarginHistogram margin_experiment(const TinyClassifier& ce_model, const TinyClassifier& edl_model,
                                  const DataSplit& data);

struct Theorem1Stats {
  std::size_t n = 0;
  std::size_t eta_valid = 0;       // eta_i < nu - b_y
  std::size_t lemma2_holds = 0;    // among eta_valid (eta > 0): EDL margin >= lower bound
  std::size_t hypothesis = 0;      // eta_valid and L >= threshold(eta_i)
  std::size_t chain_holds = 0;     // among hypothesis: EDL margin >= implied CE margin
  std::size_t edl_ge_ce = 0;       // EDL margin >= CE margin, all samples
  double freq_edl_ge_ce = 0.0;
  double freq_hypothesis = 0.0;
};

/// Per-sample check of the margin chain; L is the CE model's per-sample loss
/// and eta_i = max(nu - alpha_y, max_{j != y}(alpha_j - b_j), 0) for the EDL
/// model with b = 1_C.
Theorem1Stats theorem1_check(const TinyClassifier& ce_model, const TinyClassifier& edl_model,
                             const DataSplit& data, double nu);

struct Check {
  std::string name;
  bool passed = false;
  bool mandatory = true;
  std::map<std::string, double> values;
  std::string note;
};

struct VerificationReport {
  std::vector<Check> checks;
  std::string interpretation;

  bool all_mandatory_passed() const;
  std::string to_text() const;
  std::string to_json() const;
};

struct SuiteConfig {
  SynthSpec synth;
  PretrainConfig ce;
  PretrainConfig edl;
  std::vector<std::uint64_t> seeds{0, 1, 2};

  SuiteConfig();
};

VerificationReport run_suite(const SuiteConfig& cfg);

}  // namespace etn::theory
