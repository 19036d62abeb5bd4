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
#include <filesystem>
#include <span>
#include <vector>

#include "etn/bundle.hpp"
#include "etn/mlp.hpp"

namespace etn {

struct SynthSpec {
  int num_classes = 4;
  int feature_dim = 2;
  double radius = 4.0;
  double sigma = 1.0;
  double ood_shift = 6.0;  // OOD means = ID means + ood_shift * e_0
  std::size_t n_pretrain = 2000;
  std::size_t n_adapt = 500;
  std::size_t n_test = 1000;
  std::size_t n_ood = 1000;
  std::uint64_t seed = 0;

  void validate() const;  // throws kConfig
};

struct SynthData {
  DataSplit pretrain;
  DataSplit adapt;
  DataSplit test;
  DataSplit ood;  // labels name the source blob
};

/// Class means: radius * (cos, sin)(2 pi c / C) in the first two coordinates,
/// or radius * e_c when feature_dim >= num_classes.
std::vector<std::vector<double>> class_means(const SynthSpec& spec);

/// Each split is drawn from its own substream; classes are balanced and
/// interleaved in random order.
SynthData gen_synth(const SynthSpec& spec);

enum class PretrainLoss : std::uint8_t { kCrossEntropy = 0, kEdl = 1 };

PretrainLoss parse_pretrain_loss(std::string_view name);  // "ce" | "edl", throws kUsage

struct PretrainConfig {
  PretrainLoss loss = PretrainLoss::kCrossEntropy;
  int hidden_dim = 32;
  double learning_rate = 1e-2;
  int epochs = 30;
  int batch_size = 64;
  double edl_lambda = 0.01;   // weight of KL(Dir(alpha~) || Dir(1)), annealed
  int edl_anneal_epochs = 10;  // weight ramps as min(1, epoch / anneal)
  double nu = 1e4;
  std::uint64_t seed = 0;

  void validate() const;
};

/// D -> H -> C rectifier network standing in for a pretrained backbone.
class TinyClassifier {
 public:
  TinyClassifier(int input_dim, int hidden_dim, int num_classes, PretrainLoss loss);

  int input_dim() const { return net_.input_dim(); }
  int hidden_dim() const { return net_.sizes()[1]; }
  int num_classes() const { return net_.output_dim(); }
  PretrainLoss loss() const { return loss_; }
  const Mlp& net() const { return net_; }

  std::vector<double> logits(std::span<const float> x) const;
  /// Hidden activations and logits from one forward pass.
  void forward(std::span<const float> x, std::vector<double>& hidden, std::vector<double>& logits) const;

  std::vector<double> params;

 private:
  Mlp net_;
  PretrainLoss loss_;
};

struct PretrainHistory {
  std::vector<double> epoch_loss;
};

TinyClassifier pretrain(const DataSplit& data, const PretrainConfig& cfg,
                        PretrainHistory* history = nullptr);

double accuracy(const TinyClassifier& model, const DataSplit& data);

/// Features are the hidden activations; both arrays are cast to float32.
LogitBundle export_bundle(const TinyClassifier& model, const DataSplit& data, bool with_labels);

namespace model_file {

inline constexpr std::uint32_t kVersion = 1;

/// "ETNM", u32 version, u8 loss, then u64-length-prefixed f64 arrays:
/// [input_dim, hidden_dim, C], params.
std::vector<std::uint8_t> save(const TinyClassifier& model);
TinyClassifier load(std::span<const std::uint8_t> bytes);
void save_file(const std::filesystem::path& path, const TinyClassifier& model);
TinyClassifier load_file(const std::filesystem::path& path);

}  // namespace model_file
}  // namespace etn
