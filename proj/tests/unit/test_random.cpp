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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "etn/random.hpp"
#include "etn/specfun.hpp"

using etn::RandomStream;

namespace {

TEST(RandomStream, DeterministicPerSeed) {
  RandomStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs = differs || x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(RandomStream, DerivedStreamsAreIndependentOfEachOther) {
  EXPECT_NE(RandomStream::derive_seed(1, "etn.init"), RandomStream::derive_seed(1, "etn.shuffle"));
  EXPECT_NE(RandomStream::derive_seed(1, "etn.init"), RandomStream::derive_seed(2, "etn.init"));
  auto a = RandomStream::derive(5, "etn.infer", 3);
  auto b = RandomStream::derive(5, "etn.infer", 3);
  auto c = RandomStream::derive(5, "etn.infer", 4);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
}

TEST(RandomStream, UniformInOpenInterval) {
  RandomStream r(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(2);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(RandomStream, GammaMomentsAllShapes) {
  for (double k : {0.05, 0.4, 1.0, 3.5, 40.0}) {
    RandomStream r(3);
    double s = 0.0, slog = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double g = r.gamma(k);
      ASSERT_GE(g, 0.0);
      s += g;
    }
    EXPECT_NEAR(s / n / k, 1.0, 5 * std::sqrt(1.0 / (k * n))) << k;
    RandomStream r2(4);
    for (int i = 0; i < n; ++i) slog += r2.log_gamma(k);
    EXPECT_NEAR(slog / n, etn::specfun::digamma(k), 5 * std::sqrt(etn::specfun::trigamma(k) / n)) << k;
  }
}

TEST(RandomStream, LogGammaFiniteForTinyShape) {
  RandomStream r(9);
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(std::isfinite(r.log_gamma(1e-3)));
}

TEST(RandomStream, BelowIsUniform) {
  RandomStream r(6);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

}  // namespace
