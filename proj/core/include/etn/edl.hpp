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
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "etn/dirichlet.hpp"

namespace etn {

using Logits = std::vector<double>;

enum class EvidenceFunction : std::uint8_t { kSoftplus = 0 };

struct EvidenceConfig {
  int num_classes = 0;
  std::vector<double> prior_belief;  // b, one entry per class, each >= 0
  double nu = 1e4;                   // target concentration on the label
  double lambda = 1.0;               // weight of the KL regulariser
  EvidenceFunction f = EvidenceFunction::kSoftplus;

  /// Uniform b = 1_C.
  static EvidenceConfig standard(int num_classes, double nu = 1e4, double lambda = 1.0);

  /// Throws kConfig when an invariant is violated.
  void validate() const;
};

struct ScalarTransform {
  double a;
};
struct VectorTransform {
  std::vector<double> a;
};
struct MatrixTransform {
  Eigen::MatrixXd a;
};

/// Transformation applied to logits: z' = A z.
using TransformParam = std::variant<ScalarTransform, VectorTransform, MatrixTransform>;

namespace edl {

/// Throws kInvalidArgument when scalar/vector entries or matrix diagonal are
/// not strictly positive.
void validate_transform(const TransformParam& transform);

Logits apply_transform(std::span<const double> z, const TransformParam& transform);

/// alpha_i = softplus(z_i) + b_i. The result is floored at the smallest
/// normal double so b_i = 0 with a saturated softplus stays a valid Dirichlet.
DirichletParams logits_to_alpha(std::span<const double> z, const EvidenceConfig& cfg);
DirichletParams logits_to_alpha(std::span<const double> z, std::span<const double> prior_belief);

/// alpha^y = 1_C + (nu - 1) e_y.
DirichletParams target_alpha(int y, const EvidenceConfig& cfg);
DirichletParams target_alpha(int y, int num_classes, double nu);

/// Softmax cross-entropy log(1 + sum_{j != y} exp(z_j - z_y)).
double cross_entropy(std::span<const double> z, int y);

/// z_y - max_{j != y} z_j.
double margin(std::span<const double> z, int y);

/// KL(Dir(from) || Dir(to)).
double reverse_kl_dirichlet(const DirichletParams& from, const DirichletParams& to);

/// Gradient of reverse_kl_dirichlet with respect to the `from` concentrations.
std::vector<double> reverse_kl_dirichlet_grad(const DirichletParams& from,
                                              const DirichletParams& to);

/// Reconstruction log-term of the ELBO: E_{pi ~ Dir(target)}[log Dir(pi | alpha')],
/// = -ln B(alpha') + sum (alpha'_i - 1)(psi(target_i) - psi(target_0)).
double elbo_reconstruction(const DirichletParams& alpha_prime, const DirichletParams& target);
double elbo_reconstruction(const DirichletParams& alpha_prime, int y, const EvidenceConfig& cfg);

/// d elbo_reconstruction / d alpha'_i = psi(alpha'_0) - psi(alpha'_i) + psi(t_i) - psi(t_0).
std::vector<double> elbo_reconstruction_grad(const DirichletParams& alpha_prime,
                                             const DirichletParams& target);

/// psi(t_i) - psi(t_0): the expected log-probabilities under the target.
std::vector<double> expected_log_pi(const DirichletParams& target);

}  // namespace edl
}  // namespace etn
