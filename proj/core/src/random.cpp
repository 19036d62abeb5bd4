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

#include "etn/random.hpp"

#include <cmath>

#include "etn/error.hpp"

namespace etn {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

std::uint64_t RandomStream::derive_seed(std::uint64_t root, std::string_view tag) {
  return splitmix64(root ^ fnv1a64(tag));
}

RandomStream RandomStream::derive(std::uint64_t root, std::string_view tag) {
  return RandomStream(derive_seed(root, tag));
}

RandomStream RandomStream::derive(std::uint64_t root, std::string_view tag,
                                  std::uint64_t index) {
  return RandomStream(splitmix64(derive_seed(root, tag) + splitmix64(index)));
}

double RandomStream::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0) || std::isinf(shape)) {
    fail(ErrorCategory::kDomain, "RandomStream::gamma: shape must be positive");
  }
  if (shape < 1.0) {
    const double boosted = gamma(shape + 1.0);
    return boosted * std::pow(uniform(), 1.0 / shape);
  }
  return marsaglia_tsang(shape);
}

double RandomStream::log_gamma(double shape) {
  if (!(shape > 0.0) || std::isinf(shape)) {
    fail(ErrorCategory::kDomain, "RandomStream::log_gamma: shape must be positive");
  }
  if (shape < 1.0) {
    const double boosted = marsaglia_tsang(shape + 1.0);
    return std::log(boosted) + std::log(uniform()) / shape;
  }
  return std::log(marsaglia_tsang(shape));
}

double RandomStream::marsaglia_tsang(double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) fail(ErrorCategory::kInvalidArgument, "RandomStream::below: n must be positive");
  // rejection to remove modulo bias
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace etn
