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

#include <span>
#include <vector>

#include "etn/bundle.hpp"
#include "etn/etn.hpp"

namespace etn {

/// Sample-independent baseline: alpha = softplus(a z) + b with one global
/// a > 0 and one shared b > 0.
struct StaticScaling {
  double a = 1.0;
  double b = 1.0;
  double loss = 0.0;  // mean reverse KL at (a, b)
  int steps = 0;
};

struct StaticConfig {
  double learning_rate = 1e-2;
  int steps = 300;  // full-batch Adam steps
  double nu = 1e4;

  void validate() const;
};

/// Mean KL(Dir(softplus(a z) + b) || Dir(alpha^y)) over labeled records.
double static_loss(const StaticScaling& s, std::span<const LogitRecord> records, double nu);

/// Minimises static_loss over (log-softplus parameterised) a and b starting
/// from a = b = 1; returns the lowest-loss iterate.
StaticScaling fit_static(std::span<const LogitRecord> records, const StaticConfig& cfg);

/// The untransformed evidential head: a = 1, b = 1.
inline StaticScaling identity_scaling() { return StaticScaling{}; }

Inference predict_static(const StaticScaling& s, const LogitRecord& record);
std::vector<Inference> predict_static_all(const StaticScaling& s, std::span<const LogitRecord> records);

}  // namespace etn
