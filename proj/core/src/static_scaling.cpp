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

#include "etn/static_scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "etn/edl.hpp"
#include "etn/error.hpp"
#include "etn/specfun.hpp"

namespace etn {
namespace {

DirichletParams static_alpha(double a, double b, std::span<const double> z) {
  std::vector<double> alpha(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    alpha[i] = std::max(specfun::softplus(a * z[i]) + b, std::numeric_limits<double>::min());
  }
  return DirichletParams(std::move(alpha));
}

// Mean loss and gradient with respect to (a, b).
double loss_and_grad(double a, double b, std::span<const LogitRecord> records, double nu,
                     double& ga, double& gb) {
  ga = gb = 0.0;
  double loss = 0.0;
  const double inv = 1.0 / static_cast<double>(records.size());
  for (const auto& r : records) {
    if (r.label < 0) fail(ErrorCategory::kInvalidArgument, "static scaling needs labeled records");
    const int c = static_cast<int>(r.logits.size());
    const DirichletParams alpha = static_alpha(a, b, r.logits);
    const DirichletParams target = edl::target_alpha(r.label, c, nu);
    loss += edl::reverse_kl_dirichlet(alpha, target) * inv;
    const std::vector<double> g = edl::reverse_kl_dirichlet_grad(alpha, target);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga += g[i] * specfun::sigmoid(a * r.logits[i]) * r.logits[i] * inv;
      gb += g[i] * inv;
    }
  }
  return loss;
}

}  // namespace

void StaticConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorCategory::kConfig, "learning rate must be > 0");
  if (steps < 1) fail(ErrorCategory::kConfig, "steps must be >= 1");
  if (!(nu > 2.0)) fail(ErrorCategory::kConfig, "nu must be > 2");
}

double static_loss(const StaticScaling& s, std::span<const LogitRecord> records, double nu) {
  if (records.empty()) fail(ErrorCategory::kInvalidArgument, "static_loss: no records");
  double ga, gb;
  return loss_and_grad(s.a, s.b, records, nu, ga, gb);
}

StaticScaling fit_static(std::span<const LogitRecord> records, const StaticConfig& cfg) {
  cfg.validate();
  if (records.empty()) fail(ErrorCategory::kInvalidArgument, "fit_static: no records");
  std::vector<double> raw{specfun::softplus_inv(1.0), specfun::softplus_inv(1.0)};
  Adam opt(2, AdamConfig{cfg.learning_rate});
  StaticScaling best;
  best.loss = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= cfg.steps; ++step) {
    const double a = specfun::softplus(raw[0]);
    const double b = specfun::softplus(raw[1]);
    double ga, gb;
    const double loss = loss_and_grad(a, b, records, cfg.nu, ga, gb);
    if (!std::isfinite(loss)) {
      fail(ErrorCategory::kNumerical, "static scaling: non-finite loss at step " + std::to_string(step));
    }
    if (loss < best.loss) best = StaticScaling{a, b, loss, step};
    if (step == cfg.steps) break;
    const std::vector<double> g{ga * specfun::sigmoid(raw[0]), gb * specfun::sigmoid(raw[1])};
    opt.step(raw, g);
  }
  return best;
}

Inference predict_static(const StaticScaling& s, const LogitRecord& record) {
  const DirichletParams alpha = static_alpha(s.a, s.b, record.logits);
  Inference out{dirichlet::mean(alpha), {}};
  out.scores.mp = dirichlet::max_probability(alpha);
  out.scores.um = alpha.alpha0();
  out.scores.mi = dirichlet::mutual_information(alpha);
  out.scores.de = dirichlet::differential_entropy(alpha);
  return out;
}

std::vector<Inference> predict_static_all(const StaticScaling& s, std::span<const LogitRecord> records) {
  std::vector<Inference> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(predict_static(s, r));
  return out;
}

}  // namespace etn
