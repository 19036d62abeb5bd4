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

#include "etn/edl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "etn/error.hpp"
#include "etn/specfun.hpp"

namespace etn {

EvidenceConfig EvidenceConfig::standard(int num_classes, double nu, double lambda) {
  EvidenceConfig cfg;
  cfg.num_classes = num_classes;
  cfg.prior_belief.assign(static_cast<std::size_t>(std::max(num_classes, 0)), 1.0);
  cfg.nu = nu;
  cfg.lambda = lambda;
  return cfg;
}

void EvidenceConfig::validate() const {
  if (num_classes < 2) fail(ErrorCategory::kConfig, "EvidenceConfig: num_classes must be >= 2");
  if (prior_belief.size() != static_cast<std::size_t>(num_classes)) {
    fail(ErrorCategory::kConfig, "EvidenceConfig: prior_belief length must equal num_classes");
  }
  double b_max = 0.0;
  for (double b : prior_belief) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      fail(ErrorCategory::kConfig, "EvidenceConfig: prior_belief entries must be >= 0");
    }
    b_max = std::max(b_max, b);
  }
  if (!(nu > b_max + 1.0)) fail(ErrorCategory::kConfig, "EvidenceConfig: nu must exceed max(b) + 1");
  if (!(lambda >= 0.0)) fail(ErrorCategory::kConfig, "EvidenceConfig: lambda must be >= 0");
}

namespace edl {
namespace {

void check_label(int y, std::size_t num_classes) {
  if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
    std::ostringstream msg;
    msg << "label " << y << " out of range for " << num_classes << " classes";
    fail(ErrorCategory::kInvalidArgument, msg.str());
  }
}

void check_same_size(const DirichletParams& a, const DirichletParams& b, const char* fn) {
  if (a.size() != b.size()) fail(ErrorCategory::kDimension, std::string(fn) + ": size mismatch");
}

}  // namespace

void validate_transform(const TransformParam& transform) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ScalarTransform>) {
          if (!(t.a > 0.0)) fail(ErrorCategory::kInvalidArgument, "scalar transform must be > 0");
        } else if constexpr (std::is_same_v<T, VectorTransform>) {
          for (double v : t.a) {
            if (!(v > 0.0)) fail(ErrorCategory::kInvalidArgument, "vector transform must be > 0");
          }
        } else {
          if (t.a.rows() != t.a.cols()) {
            fail(ErrorCategory::kDimension, "matrix transform must be square");
          }
          for (Eigen::Index i = 0; i < t.a.rows(); ++i) {
            if (!(t.a(i, i) > 0.0)) {
              fail(ErrorCategory::kInvalidArgument, "matrix transform diagonal must be > 0");
            }
          }
        }
      },
      transform);
}

Logits apply_transform(std::span<const double> z, const TransformParam& transform) {
  Logits out(z.begin(), z.end());
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ScalarTransform>) {
          for (double& v : out) v *= t.a;
        } else if constexpr (std::is_same_v<T, VectorTransform>) {
          if (t.a.size() != z.size()) fail(ErrorCategory::kDimension, "vector transform size");
          for (std::size_t i = 0; i < out.size(); ++i) out[i] *= t.a[i];
        } else {
          const auto n = static_cast<Eigen::Index>(z.size());
          if (t.a.rows() != n || t.a.cols() != n) {
            fail(ErrorCategory::kDimension, "matrix transform size");
          }
          const Eigen::Map<const Eigen::VectorXd> zv(z.data(), n);
          Eigen::Map<Eigen::VectorXd>(out.data(), n) = t.a * zv;
        }
      },
      transform);
  return out;
}

DirichletParams logits_to_alpha(std::span<const double> z, std::span<const double> prior_belief) {
  if (z.size() != prior_belief.size()) fail(ErrorCategory::kDimension, "logits_to_alpha: size");
  std::vector<double> alpha(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    alpha[i] = std::max(specfun::softplus(z[i]) + prior_belief[i],
                        std::numeric_limits<double>::min());
  }
  return DirichletParams(std::move(alpha));
}

DirichletParams logits_to_alpha(std::span<const double> z, const EvidenceConfig& cfg) {
  return logits_to_alpha(z, std::span<const double>(cfg.prior_belief));
}

DirichletParams target_alpha(int y, int num_classes, double nu) {
  check_label(y, static_cast<std::size_t>(std::max(num_classes, 0)));
  std::vector<double> alpha(static_cast<std::size_t>(num_classes), 1.0);
  alpha[static_cast<std::size_t>(y)] = nu;
  return DirichletParams(std::move(alpha));
}

DirichletParams target_alpha(int y, const EvidenceConfig& cfg) {
  return target_alpha(y, cfg.num_classes, cfg.nu);
}

double cross_entropy(std::span<const double> z, int y) {
  check_label(y, z.size());
  const double zy = z[static_cast<std::size_t>(y)];
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (static_cast<int>(j) != y) top = std::max(top, z[j] - zy);
  }
  if (top <= 0.0) {
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (static_cast<int>(j) != y) s += std::exp(z[j] - zy);
    }
    return std::log1p(s);
  }
  // log(1 + s) = top + log(e^-top + sum e^(d_j - top))
  double s = std::exp(-top);
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (static_cast<int>(j) != y) s += std::exp(z[j] - zy - top);
  }
  return top + std::log(s);
}

double margin(std::span<const double> z, int y) {
  check_label(y, z.size());
  if (z.size() < 2) fail(ErrorCategory::kInvalidArgument, "margin: need at least two classes");
  double rival = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (static_cast<int>(j) != y) rival = std::max(rival, z[j]);
  }
  return z[static_cast<std::size_t>(y)] - rival;
}

double reverse_kl_dirichlet(const DirichletParams& from, const DirichletParams& to) {
  check_same_size(from, to, "reverse_kl_dirichlet");
  const double psi0 = specfun::digamma(from.alpha0());
  double kl = specfun::lgamma(from.alpha0()) - specfun::lgamma(to.alpha0());
  for (std::size_t i = 0; i < from.size(); ++i) {
    kl += specfun::lgamma(to[i]) - specfun::lgamma(from[i]) +
          (from[i] - to[i]) * (specfun::digamma(from[i]) - psi0);
  }
  return kl;
}

std::vector<double> reverse_kl_dirichlet_grad(const DirichletParams& from,
                                              const DirichletParams& to) {
  check_same_size(from, to, "reverse_kl_dirichlet_grad");
  // d/d a_i = (a_i - b_i) psi'(a_i) - psi'(a_0) sum_j (a_j - b_j)
  double excess = 0.0;
  for (std::size_t j = 0; j < from.size(); ++j) excess += from[j] - to[j];
  const double tri0 = specfun::trigamma(from.alpha0());
  std::vector<double> g(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    g[i] = (from[i] - to[i]) * specfun::trigamma(from[i]) - tri0 * excess;
  }
  return g;
}

std::vector<double> expected_log_pi(const DirichletParams& target) {
  const double psi0 = specfun::digamma(target.alpha0());
  std::vector<double> e(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) e[i] = specfun::digamma(target[i]) - psi0;
  return e;
}

double elbo_reconstruction(const DirichletParams& alpha_prime, const DirichletParams& target) {
  check_same_size(alpha_prime, target, "elbo_reconstruction");
  const std::vector<double> e = expected_log_pi(target);
  double r = -dirichlet::log_beta(alpha_prime);
  for (std::size_t i = 0; i < alpha_prime.size(); ++i) r += (alpha_prime[i] - 1.0) * e[i];
  return r;
}

double elbo_reconstruction(const DirichletParams& alpha_prime, int y, const EvidenceConfig& cfg) {
  return elbo_reconstruction(alpha_prime, target_alpha(y, cfg));
}

std::vector<double> elbo_reconstruction_grad(const DirichletParams& alpha_prime,
                                             const DirichletParams& target) {
  check_same_size(alpha_prime, target, "elbo_reconstruction_grad");
  const std::vector<double> e = expected_log_pi(target);
  const double psi0 = specfun::digamma(alpha_prime.alpha0());
  std::vector<double> g(alpha_prime.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = psi0 - specfun::digamma(alpha_prime[i]) + e[i];
  }
  return g;
}

}  // namespace edl
}  // namespace etn
