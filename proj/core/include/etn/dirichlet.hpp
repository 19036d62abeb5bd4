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

#include "etn/random.hpp"

namespace etn {

/// Concentration vector of a Dirichlet over C >= 2 classes.
class DirichletParams {
 public:
  /// Throws kInvalidArgument unless C >= 2 and every entry is positive and finite.
  explicit DirichletParams(std::vector<double> alpha);

  std::span<const double> alpha() const { return alpha_; }
  double operator[](std::size_t i) const { return alpha_[i]; }
  double alpha0() const { return alpha0_; }
  std::size_t size() const { return alpha_.size(); }

 private:
  std::vector<double> alpha_;
  double alpha0_;
};

/// A categorical probability vector.
class SimplexPoint {
 public:
  /// Throws kInvalidArgument unless entries are non-negative and sum to 1
  /// within 1e-9.
  explicit SimplexPoint(std::vector<double> pi);

  std::span<const double> pi() const { return pi_; }
  double operator[](std::size_t i) const { return pi_[i]; }
  std::size_t size() const { return pi_.size(); }
  std::size_t argmax() const;

 private:
  std::vector<double> pi_;
};

namespace dirichlet {

/// ln B(alpha) = sum ln Gamma(alpha_i) - ln Gamma(alpha_0).
double log_beta(const DirichletParams& d);

SimplexPoint mean(const DirichletParams& d);

/// Log density. Points on the boundary give -infinity unless the matching
/// alpha_i equals 1.
double log_pdf(const DirichletParams& d, std::span<const double> pi);

double differential_entropy(const DirichletParams& d);

/// Closed form H[E pi] - E[H(pi)], clamped at zero.
double mutual_information(const DirichletParams& d);

double max_probability(const DirichletParams& d);

/// Normalised independent Gamma(alpha_i, 1) draws, accumulated in log space.
SimplexPoint sample(const DirichletParams& d, RandomStream& rng);

}  // namespace dirichlet
}  // namespace etn
