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
#include <span>
#include <vector>

#include "etn/bundle.hpp"
#include "etn/dirichlet.hpp"
#include "etn/edl.hpp"
#include "etn/mlp.hpp"
#include "etn/random.hpp"
#include "etn/variational.hpp"

namespace etn {

struct MlpSpec {
  int input_dim = 0;
  int hidden_dim = 256;
  int num_layers = 2;  // linear layers per head

  void validate() const;
};

/// Evidential Transformation Network: one MLP head per variational parameter,
/// mapping standardized features to q(A | x).
///
/// Head layout by family:
///   scalar: shape (1), rate (1)
///   vector: shapes (C), rates (C)
///   matrix: mu (C*C, row-major), L_B and L_D (C(C+1)/2 each, packed lower
///           triangle row by row; diagonal through softplus)
/// Positive outputs are softplus(raw) + 1e-4.
class EtnModel {
 public:
  static constexpr double kPositiveFloor = 1e-4;

  EtnModel(Family family, MlpSpec spec, int num_classes, PriorSpec prior, double nu = 1e4,
           double lambda = 1.0, double odir_weight = 0.01);

  Family family() const { return family_; }
  const MlpSpec& spec() const { return spec_; }
  int num_classes() const { return num_classes_; }
  const PriorSpec& prior() const { return prior_; }
  double nu() const { return nu_; }
  double lambda() const { return lambda_; }
  double odir_weight() const { return odir_weight_; }
  const std::vector<Mlp>& heads() const { return heads_; }
  std::size_t head_offset(std::size_t k) const { return head_offsets_[k]; }

  /// Initialise weights from `seed` and reset b to 1_C.
  void init(std::uint64_t seed);

  /// Standardization statistics from an adaptation set (std < 1e-12 -> 1).
  void fit_feature_stats(std::span<const LogitRecord> records);

  std::vector<double> standardize(std::span<const double> features) const;

  /// softplus(b_raw).
  std::vector<double> prior_belief() const;
  EvidenceConfig evidence_config() const;

  VariationalParams predict_variational(std::span<const double> features) const;

  std::vector<double> params;        // all head weights, concatenated
  std::vector<double> b_raw;         // length C
  std::vector<double> feature_mean;  // length D
  std::vector<double> feature_std;   // length D

 private:
  Family family_;
  MlpSpec spec_;
  int num_classes_;
  PriorSpec prior_;
  double nu_;
  double lambda_;
  double odir_weight_;
  std::vector<Mlp> heads_;
  std::vector<std::size_t> head_offsets_;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 50;
  int batch_size = 64;
  int mc_samples = 20;
  double lambda = 1.0;
  double nu = 1e4;
  PriorSpec prior;
  double odir_weight = 0.01;
  std::uint64_t seed = 0;

  void validate() const;  // throws kConfig
};

struct LossBreakdown {
  double total = 0.0;
  double recon = 0.0;  // -(1/M) sum_m reconstruction, batch mean
  double kl = 0.0;     // KL(q || p), batch mean, before the lambda weight
  double odir = 0.0;   // weighted penalty, batch mean
};

struct LossResult {
  LossBreakdown loss;
  std::vector<double> grad_params;
  std::vector<double> grad_b_raw;
};

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;  // full adaptation-set evaluation after the epoch
};

struct TrainResult {
  std::vector<EpochRecord> history;  // epoch 0 = before training
  int best_epoch = 0;
  double best_loss = 0.0;
};

struct UncertaintyScores {
  double mp = 0.0;
  double um = 0.0;
  double mi = 0.0;
  double de = 0.0;
};

struct Inference {
  SimplexPoint p;
  UncertaintyScores scores;
};

/// Mean variational loss over a labeled batch with gradients for every head
/// weight and b_raw. The scalar family ties b across classes: every entry of
/// grad_b_raw holds the summed gradient.
LossResult loss_batch(const EtnModel& model, std::span<const LogitRecord> batch, int mc_samples,
                      RandomStream& rng, bool with_grad = true);

/// Builds a model with the config's prior, nu, lambda and ODIR weight and
/// initialises it from the config seed.
EtnModel make_model(Family family, const MlpSpec& spec, int num_classes, const TrainConfig& cfg);

/// Fits feature statistics and optimises with Adam. On return the model holds
/// the checkpoint with the lowest adaptation-set loss over epochs 1..E.
TrainResult train(EtnModel& model, std::span<const LogitRecord> adapt, const TrainConfig& cfg);

/// Monte-Carlo marginalisation over A.
Inference infer(const EtnModel& model, const LogitRecord& record, int mc_samples,
                RandomStream& rng);

/// Per-sample streams derived from (seed, index), so results do not depend
/// on how samples are batched or ordered.
std::vector<Inference> infer_all(const EtnModel& model, std::span<const LogitRecord> records,
                                 int mc_samples, std::uint64_t seed);

namespace checkpoint {

inline constexpr std::uint32_t kVersion = 1;

/// "ETNC", u32 version, u8 family, then u64-length-prefixed f64 arrays:
/// [input_dim, hidden_dim, num_layers, C], [nu, lambda, f], [mode, variance,
/// odir_weight], feature_mean, feature_std, b_raw, params.
std::vector<std::uint8_t> save(const EtnModel& model);
EtnModel load(std::span<const std::uint8_t> bytes);
EtnModel load(std::span<const std::uint8_t> bytes, Family expected);

void save_file(const std::filesystem::path& path, const EtnModel& model);
EtnModel load_file(const std::filesystem::path& path);

}  // namespace checkpoint
}  // namespace etn
