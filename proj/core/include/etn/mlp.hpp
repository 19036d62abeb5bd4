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

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "etn/random.hpp"

namespace etn {

/// Fully connected network with rectifier activations between layers and a
/// linear output. Weights live in a caller-owned flat vector so several
/// networks can share one parameter buffer and one optimiser.
///
/// Layout per layer: weight matrix (out x in, column-major), then bias.
class Mlp {
 public:
  /// sizes = {in, hidden..., out}; at least two entries.
  explicit Mlp(std::vector<int> sizes);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t num_layers() const { return sizes_.size() - 1; }
  std::size_t num_params() const { return num_params_; }
  const std::vector<int>& sizes() const { return sizes_; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init(std::span<double> params, RandomStream& rng) const;

  /// Post-activation values of every layer, input first.
  struct Cache {
    std::vector<Eigen::VectorXd> act;
  };

  Eigen::VectorXd forward(std::span<const double> params, const Eigen::VectorXd& x,
                          Cache* cache = nullptr) const;

  /// Accumulates dL/dparams into grad given dL/doutput. Returns dL/dinput.
  Eigen::VectorXd backward(std::span<const double> params, const Cache& cache,
                           const Eigen::VectorXd& grad_out, std::span<double> grad) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t num_params_ = 0;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t num_params, AdamConfig cfg);

  void step(std::span<double> params, std::span<const double> grad);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

}  // namespace etn
