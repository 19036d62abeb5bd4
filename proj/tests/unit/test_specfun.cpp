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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "etn/error.hpp"
#include "etn/specfun.hpp"
#include "oracles.hpp"

namespace sf = etn::specfun;

namespace {

constexpr double kEuler = 0.57721566490153286;

TEST(Lgamma, KnownValues) {
  EXPECT_NEAR(sf::lgamma(1.0), 0.0, 1e-14);
  EXPECT_NEAR(sf::lgamma(2.0), 0.0, 1e-14);
  EXPECT_NEAR(sf::lgamma(5.0), std::log(24.0), 1e-13);
  EXPECT_NEAR(sf::lgamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-13);
}

TEST(Lgamma, MatchesStdOverWideRange) {
  for (double x = 1e-3; x < 1e6; x *= 1.37) {
    EXPECT_NEAR(sf::lgamma(x), std::lgamma(x), 1e-13 * std::max(1.0, std::abs(std::lgamma(x)))) << x;
  }
}

TEST(Lgamma, RejectsNonPositive) {
  EXPECT_THROW(sf::lgamma(0.0), etn::Error);
  EXPECT_THROW(sf::lgamma(-1.5), etn::Error);
}

TEST(Lgamma, Recurrence) {
  for (double x = 0.1; x <= 1e4; x *= 1.011) {
    EXPECT_NEAR(sf::lgamma(x + 1.0) - sf::lgamma(x), std::log(x), 1e-9) << x;
  }
}

TEST(Digamma, KnownValues) {
  EXPECT_NEAR(sf::digamma(1.0), -kEuler, 1e-13);
  EXPECT_NEAR(sf::digamma(2.0), 1.0 - kEuler, 1e-13);
  EXPECT_NEAR(sf::digamma(0.5), -kEuler - 2.0 * std::log(2.0), 1e-13);
}

TEST(Digamma, RecurrenceAndReference) {
  for (double x = 1e-3; x <= 1e6; x *= 1.05) {
    EXPECT_NEAR(sf::digamma(x + 1.0) - sf::digamma(x), 1.0 / x, 1e-9 * std::max(1.0, 1.0 / x)) << x;
    EXPECT_NEAR(sf::digamma(x), oracle::digamma_reference(x), 1e-11 * std::max(1.0, std::abs(sf::digamma(x)))) << x;
  }
  EXPECT_THROW(sf::digamma(0.0), etn::Error);
}

TEST(Trigamma, DerivativeOfDigamma) {
  for (double x : {0.05, 0.3, 1.0, 4.5, 30.0, 1e3}) {
    const double fd = oracle::central_difference([](double t) { return sf::digamma(t); }, x, 1e-5 * x);
    EXPECT_NEAR(sf::trigamma(x), fd, 1e-6 * std::abs(fd)) << x;
  }
  EXPECT_NEAR(sf::trigamma(1.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
}

TEST(Softplus, KnownValues) {
  EXPECT_NEAR(sf::softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(sf::softplus(40.0), 40.0, 1e-12);
  EXPECT_NEAR(sf::softplus(-40.0) / std::exp(-40.0), 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(sf::softplus(1000.0)));
  EXPECT_EQ(sf::softplus(1000.0), 1000.0);
}

TEST(Softplus, Monotone) {
  double prev = sf::softplus(-50.0);
  for (double x = -49.9; x <= 50.0; x += 0.1) {
    const double v = sf::softplus(x);
    EXPECT_GT(v, prev) << x;
    prev = v;
  }
}

TEST(SoftplusInv, KnownValuesAndRoundTrip) {
  EXPECT_NEAR(sf::softplus_inv(std::log(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(sf::softplus_inv(1.0), std::log(std::numbers::e - 1.0), 1e-15);
  EXPECT_NEAR(sf::softplus_inv(1e4), 1e4, 1e-9);
  for (double x = -30.0; x <= 30.0; x += 0.25) {
    EXPECT_NEAR(sf::softplus_inv(sf::softplus(x)), x, 1e-9) << x;
  }
  EXPECT_THROW(sf::softplus_inv(0.0), etn::Error);
  EXPECT_THROW(sf::softplus_inv(-1.0), etn::Error);
}

TEST(Sigmoid, IsSoftplusDerivative) {
  for (double x : {-30.0, -3.0, 0.0, 0.7, 12.0}) {
    const double fd = oracle::central_difference([](double t) { return sf::softplus(t); }, x, 1e-6);
    EXPECT_NEAR(sf::sigmoid(x), fd, 1e-8);
  }
}

TEST(IncompleteGamma, ComplementAndClosedForms) {
  for (double k : {0.1, 0.5, 1.0, 3.0, 25.0, 400.0}) {
    for (double x : {1e-4, 0.1, 1.0, 5.0, 30.0, 500.0}) {
      EXPECT_NEAR(sf::gamma_p(k, x) + sf::gamma_q(k, x), 1.0, 1e-13) << k << " " << x;
    }
  }
  for (double x : {0.01, 0.5, 2.0, 9.0}) EXPECT_NEAR(sf::gamma_p(1.0, x), -std::expm1(-x), 1e-14);
  for (double x : {0.01, 0.5, 2.0, 9.0}) EXPECT_NEAR(sf::gamma_p(0.5, x), std::erf(std::sqrt(x)), 1e-13);
}

TEST(IncompleteGamma, MatchesQuadrature) {
  for (double k : {0.6, 2.5, 12.0}) {
    for (double x : {0.2, 2.0, 15.0}) {
      const double q = oracle::integrate(
          [k](double t) { return std::exp(oracle::log_gamma_density(t, k, 1.0)); }, 0.0, x, 1e-15, 1e-13, 512);
      EXPECT_NEAR(sf::gamma_p(k, x), q, 1e-9) << k << " " << x;
    }
  }
}

TEST(GammaPInverse, InvertsP) {
  for (double k : {0.05, 0.3, 1.0, 2.7, 21.95, 1e3}) {
    for (double u : {1e-12, 1e-4, 0.05, 0.5, 0.93, 1.0 - 1e-9}) {
      const double g = sf::gamma_p_inverse(k, u);
      ASSERT_GT(g, 0.0);
      const double back = u > 0.5 ? 1.0 - sf::gamma_q(k, g) : sf::gamma_p(k, g);
      EXPECT_NEAR(back, u, 1e-10 * std::max(u, 1e-3)) << k << " " << u;
    }
  }
  EXPECT_THROW(sf::gamma_p_inverse(1.0, 0.0), etn::Error);
  EXPECT_THROW(sf::gamma_p_inverse(1.0, 1.0), etn::Error);
}

TEST(LogGammaPdf, MatchesOracle) {
  for (double x : {0.01, 1.0, 7.5}) {
    EXPECT_NEAR(sf::log_gamma_pdf(x, 3.2, 1.7), oracle::log_gamma_density(x, 3.2, 1.7), 1e-12);
  }
}

}  // namespace
