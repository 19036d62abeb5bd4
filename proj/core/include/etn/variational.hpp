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
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "etn/edl.hpp"
#include "etn/random.hpp"

namespace etn {

enum class Family : std::uint8_t { kScalar = 0, kVector = 1, kMatrix = 2 };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);  // throws kConfig

struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

struct GammaVectorParams {
  std::vector<double> shapes;
  std::vector<double> rates;
};

/// vec(A_raw) ~ N(vec(mu), (L_B L_B^T) kron (L_D L_D^T)), column-major vec.
/// L_B acts on columns, L_D on rows: A_raw = mu + L_D E L_B^T.
struct KronGaussianParams {
  Eigen::MatrixXd mu;
  Eigen::MatrixXd l_b;
  Eigen::MatrixXd l_d;
};

using VariationalParams = std::variant<GammaParams, GammaVectorParams, KronGaussianParams>;

/// Gradients share the parameter layout.
using VariationalGrad = VariationalParams;

struct PriorSpec {
  double mode = 10.0;
  double variance = 5.0;
  Family family = Family::kScalar;

  void validate() const;  // throws kConfig
};

namespace variational {

Family family_of(const VariationalParams& q);

/// Throws kInvalidArgument on non-positive shapes/rates or factor diagonals.
void validate(const VariationalParams& q, int num_classes);

/// Zero gradient with the same layout as q.
VariationalGrad zero_grad(const VariationalParams& q);

/// Gamma with the given mode (k-1)/r and variance k/r^2; always k > 1.
GammaParams gamma_from_mode_variance(double mode, double variance);

double kl_gamma(const GammaParams& q, const GammaParams& p);

/// Gradient of kl_gamma with respect to q, stored as {d_shape, d_rate}.
GammaParams kl_gamma_grad(const GammaParams& q, const GammaParams& p);

/// Gaussian KL with Kronecker-factored covariances, never forming C^2 x C^2
/// matrices. Throws kNumerical on non-finite intermediates.
double kl_gauss_kron(const KronGaussianParams& q, const KronGaussianParams& p);

/// Gradient with respect to q. Factor gradients are lower triangular.
KronGaussianParams kl_gauss_kron_grad(const KronGaussianParams& q, const KronGaussianParams& p);

/// Prior over A for the given family. The matrix prior is an independent
/// Gaussian per entry: diagonal mean softplus_inv(mode), off-diagonal mean 0,
/// all variances equal to the prior variance.
VariationalParams prior_params(const PriorSpec& prior, int num_classes);

double kl_to_prior(const VariationalParams& q, const PriorSpec& prior, int num_classes);
VariationalGrad kl_to_prior_grad(const VariationalParams& q, const PriorSpec& prior,
                                 int num_classes);

/// weight / (C (C - 1)) * sum_{i != j} mu_ij^2.
double odir_penalty(const Eigen::MatrixXd& mu, double weight);
Eigen::MatrixXd odir_penalty_grad(const Eigen::MatrixXd& mu, double weight);

/// A Gamma(shape, rate) draw with its pathwise derivatives.
struct GammaDraw {
  double value;
  double d_shape;
  double d_rate;
};

/// Inverse-CDF draw x = P^{-1}(shape, u) / rate for one uniform u. The shape
/// derivative is the implicit one, -(dP/dshape) / pdf, with dP/dshape from a
/// central difference of step 1e-4 * max(1, shape).
GammaDraw gamma_draw_from_uniform(double shape, double rate, double u);
GammaDraw gamma_draw(double shape, double rate, RandomStream& rng);

/// Quantities recorded by sample_transform for the backward pass.
struct PathGradientTape {
  Family family = Family::kScalar;
  std::vector<double> d_shape;  // scalar/vector: dA_i/dshape_i
  std::vector<double> d_rate;   // scalar/vector: dA_i/drate_i
  Eigen::MatrixXd eps;          // matrix: standard normal draw E
  Eigen::MatrixXd raw;          // matrix: pre-softplus sample
};

std::pair<TransformParam, PathGradientTape> sample_transform(const VariationalParams& q,
                                                             RandomStream& rng, int num_classes);

/// Chain rule from dL/dA (same layout as the sampled transform) to the
/// variational parameters.
VariationalGrad backprop_transform(const VariationalParams& q, const PathGradientTape& tape,
                                   const TransformParam& grad_a);

/// Mean of A under q (matrix family: softplus applied to the diagonal of mu).
TransformParam mean_transform(const VariationalParams& q);

}  // namespace variational
}  // namespace etn
