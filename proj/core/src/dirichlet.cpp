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

#include "etn/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "etn/error.hpp"
#include "etn/specfun.hpp"

namespace etn {

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 2) {
    fail(ErrorCategory::kInvalidArgument, "DirichletParams: need at least two classes");
  }
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (!(alpha_[i] > 0.0) || !std::isfinite(alpha_[i])) {
      std::ostringstream msg;
      msg << "DirichletParams: alpha[" << i << "] = " << alpha_[i] << " is not positive";
      fail(ErrorCategory::kInvalidArgument, msg.str());
    }
  }
  alpha0_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

SimplexPoint::SimplexPoint(std::vector<double> pi) : pi_(std::move(pi)) {
  double total = 0.0;
  for (double p : pi_) {
    if (!(p >= 0.0)) fail(ErrorCategory::kInvalidArgument, "SimplexPoint: negative entry");
    total += p;
  }
  if (pi_.empty() || std::fabs(total - 1.0) > 1e-9) {
    fail(ErrorCategory::kInvalidArgument, "SimplexPoint: entries must sum to one");
  }
}

std::size_t SimplexPoint::argmax() const {
  return static_cast<std::size_t>(std::max_element(pi_.begin(), pi_.end()) - pi_.begin());
}

namespace dirichlet {

double log_beta(const DirichletParams& d) {
  double s = 0.0;
  for (double a : d.alpha()) s += specfun::lgamma(a);
  return s - specfun::lgamma(d.alpha0());
}

SimplexPoint mean(const DirichletParams& d) {
  std::vector<double> p(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) p[i] = d[i] / d.alpha0();
  return SimplexPoint(std::move(p));
}

double log_pdf(const DirichletParams& d, std::span<const double> pi) {
  if (pi.size() != d.size()) fail(ErrorCategory::kDimension, "log_pdf: size mismatch");
  double acc = -log_beta(d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (pi[i] == 0.0) {
      if (d[i] == 1.0) continue;
      return -std::numeric_limits<double>::infinity();
    }
    acc += (d[i] - 1.0) * std::log(pi[i]);
  }
  return acc;
}

double differential_entropy(const DirichletParams& d) {
  const double c = static_cast<double>(d.size());
  double h = log_beta(d) + (d.alpha0() - c) * specfun::digamma(d.alpha0());
  for (double a : d.alpha()) h -= (a - 1.0) * specfun::digamma(a);
  return h;
}

double mutual_information(const DirichletParams& d) {
  const double a0 = d.alpha0();
  const double psi0 = specfun::digamma(a0 + 1.0);
  double mi = 0.0;
  for (double a : d.alpha()) {
    const double p = a / a0;
    // -p ln p + p (psi(a + 1) - psi(a0 + 1))
    mi += p * (specfun::digamma(a + 1.0) - psi0 - std::log(p));
  }
  return mi < 0.0 ? 0.0 : mi;
}

double max_probability(const DirichletParams& d) {
  return *std::max_element(d.alpha().begin(), d.alpha().end()) / d.alpha0();
}

SimplexPoint sample(const DirichletParams& d, RandomStream& rng) {
  std::vector<double> logs(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) logs[i] = rng.log_gamma(d[i]);
  const double top = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (double& v : logs) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : logs) v /= total;
  return SimplexPoint(std::move(logs));
}

}  // namespace dirichlet
}  // namespace etn
