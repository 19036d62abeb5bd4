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
#include <random>
#include <string_view>

namespace etn {

/// Deterministic random source. Uniform and normal variates are derived from
/// the raw 64-bit engine output by code in this library, so streams are
/// identical across standard-library implementations.
///
/// Substreams: `RandomStream::derive(root, tag)` seeds a new stream with
/// splitmix64(root XOR fnv1a64(tag)). Every consumer of randomness names its
/// purpose with a tag ("etn.init", "etn.shuffle", ...) so adding a consumer
/// never perturbs the others.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream derive(std::uint64_t root, std::string_view tag);
  static std::uint64_t derive_seed(std::uint64_t root, std::string_view tag);

  /// Per-item substream (e.g. one per sample), independent of iteration order.
  static RandomStream derive(std::uint64_t root, std::string_view tag, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Gamma(shape, 1) by Marsaglia-Tsang squeeze/rejection. For shape < 1 the
  /// draw is boosted from Gamma(shape + 1) and rescaled by U^(1/shape).
  double gamma(double shape);

  /// Logarithm of a Gamma(shape, 1) draw; stays finite for tiny shapes where
  /// the draw itself underflows.
  double log_gamma(double shape);

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  double marsaglia_tsang(double shape);  // shape >= 1

  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace etn
