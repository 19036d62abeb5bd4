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

#include "etn/mlp.hpp"

#include <cmath>

#include "etn/error.hpp"

namespace etn {

using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) fail(ErrorCategory::kConfig, "Mlp needs at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) fail(ErrorCategory::kConfig, "Mlp layer sizes must be >= 1");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(num_params_);
    num_params_ += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
}

void Mlp::init(std::span<double> params, RandomStream& rng) const {
  if (params.size() != num_params_) fail(ErrorCategory::kDimension, "Mlp::init: parameter size");
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const std::size_t n = static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
    for (std::size_t k = 0; k < n; ++k) {
      params[offsets_[l] + k] = bound * (2.0 * rng.uniform() - 1.0);
    }
  }
}

VectorXd Mlp::forward(std::span<const double> params, const VectorXd& x, Cache* cache) const {
  if (x.size() != input_dim()) fail(ErrorCategory::kDimension, "Mlp::forward: input size");
  if (params.size() != num_params_) fail(ErrorCategory::kDimension, "Mlp::forward: params");
  if (cache) {
    cache->act.clear();
    cache->act.push_back(x);
  }
  VectorXd h = x;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const Map<const MatrixXd> w(params.data() + offsets_[l], out, in);
    const Map<const VectorXd> b(params.data() + offsets_[l] + out * in, out);
    VectorXd next = w * h + b;
    if (l + 1 < num_layers()) next = next.cwiseMax(0.0);
    h = std::move(next);
    if (cache) cache->act.push_back(h);
  }
  return h;
}

VectorXd Mlp::backward(std::span<const double> params, const Cache& cache, const VectorXd& grad_out,
                       std::span<double> grad) const {
  if (grad.size() != num_params_) fail(ErrorCategory::kDimension, "Mlp::backward: grad size");
  VectorXd g = grad_out;
  for (std::size_t l = num_layers(); l-- > 0;) {
    const int in = sizes_[l], out = sizes_[l + 1];
    if (l + 1 < num_layers()) {
      const VectorXd& a = cache.act[l + 1];
      for (int i = 0; i < out; ++i) {
        if (a[i] <= 0.0) g[i] = 0.0;
      }
    }
    Map<MatrixXd> gw(grad.data() + offsets_[l], out, in);
    Map<VectorXd> gb(grad.data() + offsets_[l] + out * in, out);
    gw.noalias() += g * cache.act[l].transpose();
    gb += g;
    const Map<const MatrixXd> w(params.data() + offsets_[l], out, in);
    g = w.transpose() * g;
  }
  return g;
}

Adam::Adam(std::size_t num_params, AdamConfig cfg)
    : cfg_(cfg), m_(num_params, 0.0), v_(num_params, 0.0) {
  if (!(cfg_.learning_rate > 0.0)) fail(ErrorCategory::kConfig, "learning rate must be > 0");
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    fail(ErrorCategory::kDimension, "Adam::step: size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    params[i] -= cfg_.learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.eps);
  }
}

}  // namespace etn
