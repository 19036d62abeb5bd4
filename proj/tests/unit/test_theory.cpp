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

#include <gtest/gtest.h>

#include "etn/basemodel.hpp"
#include "etn/error.hpp"
#include "etn/specfun.hpp"
#include "etn/theory.hpp"

using namespace etn;
namespace th = etn::theory;

namespace {

const std::vector<double> kOnes10(10, 1.0);

TEST(Constructions, AtForty) {
  const auto r = th::prop1_constructions(10, 40.0, kOnes10);
  EXPECT_LE(r.ce_bounded, 1e-15);
  EXPECT_LE(r.ce_diverging, 1e-15);
  EXPECT_NEAR(r.alpha0_bounded, 10.0 + std::log(2.0), 1e-9);
  EXPECT_NEAR(r.alpha0_diverging, 40.0 + 1.0 + 9.0 * (std::log(2.0) + 1.0), 1e-9);
}

TEST(Constructions, AtZeroCoincide) {
  const auto r = th::prop1_constructions(10, 0.0, kOnes10);
  EXPECT_NEAR(r.ce_bounded, std::log(10.0), 1e-14);
  EXPECT_NEAR(r.ce_diverging, std::log(10.0), 1e-14);
  EXPECT_NEAR(r.alpha0_bounded, r.alpha0_diverging, 1e-14);
}

TEST(Constructions, GapGrowsLikeT) {
  for (double t : {30.0, 60.0, 200.0}) {
    const auto r = th::prop1_constructions(10, t, kOnes10);
    EXPECT_NEAR(r.alpha0_diverging - r.alpha0_bounded, t + 9.0 * std::log(2.0) - std::log(2.0), 1e-9);
  }
}

TEST(MarginLowerBound, Examples) {
  EXPECT_NEAR(th::edl_margin_lower_bound({1e4, 1.0, 1.0, 2, 0.0}), specfun::softplus_inv(9998.0) - specfun::softplus_inv(1.0),
              1e-9);
  EXPECT_NEAR(th::edl_margin_lower_bound({1e4, 1.0, 1.0, 2, 0.0}), 9997.4587, 1e-4);
  EXPECT_NEAR(th::edl_margin_lower_bound({1e4, 1.0, (1e4 - 1.0) / 2, 2, 0.0}), 0.0, 1e-9);
  EXPECT_NEAR(th::edl_margin_lower_bound({3.0, 1.0, 0.5, 2, 0.0}), std::log(std::expm1(1.5)) - std::log(std::expm1(0.5)), 1e-12);
  EXPECT_NEAR(th::edl_margin_lower_bound({3.0, 1.0, 0.5, 2, 0.0}), 1.68027, 1e-5);
  EXPECT_THROW(th::edl_margin_lower_bound({3.0, 1.0, 0.0, 2, 0.0}), Error);
  EXPECT_THROW(th::edl_margin_lower_bound({3.0, 1.0, 2.5, 2, 0.0}), Error);
}

TEST(MarginLowerBound, DecreasingInEta) {
  double prev = INFINITY;
  for (double eta = 0.01; eta < 4.5; eta += 0.05) {
    const double v = th::edl_margin_lower_bound({10.0, 1.0, eta, 3, 0.0});
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Threshold, Examples) {
  EXPECT_EQ(th::corollary1_threshold({1e4, 1.0, 0.0, 10, 0.0}), 0.0);
  const double v = th::corollary1_threshold({1e4, 1.0, 1.0, 10, 0.0});
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1e-300);
  const double big = th::corollary1_threshold({10.0, 1.0, 1.0, 100000, 0.0});
  const double direct = std::log1p(99999.0 * std::expm1(1.0) / std::expm1(8.0));
  EXPECT_NEAR(big, direct, 1e-12);
  EXPECT_GT(big, th::corollary1_threshold({10.0, 1.0, 1.0, 10, 0.0}));
}

TEST(Threshold, MonotoneInEtaAndC) {
  for (int c : {2, 10, 1000}) {
    double prev = -1.0;
    for (double eta = 0.0; eta < 8.9; eta += 0.1) {
      const double v = th::corollary1_threshold({10.0, 1.0, eta, c, 0.0});
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
  double prev = -1.0;
  for (int c = 2; c < 5000; c *= 2) {
    const double v = th::corollary1_threshold({10.0, 1.0, 2.0, c, 0.0});
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(ImpliedCeMargin, InvertsLoss) {
  for (int c : {2, 4, 100}) {
    for (double g : {-2.0, 0.0, 3.0, 25.0}) {
      const double loss = std::log1p((c - 1) * std::exp(-g));
      EXPECT_NEAR(th::implied_ce_margin(loss, c), g, 1e-9 * std::max(1.0, std::abs(g)));
    }
  }
}

TEST(Quantiles, LinearInterpolation) {
  const auto q = th::quantiles({4.0, 1.0, 3.0, 2.0, 5.0});
  EXPECT_EQ(q.min, 1.0);
  EXPECT_EQ(q.median, 3.0);
  EXPECT_EQ(q.q25, 2.0);
  EXPECT_EQ(q.max, 5.0);
  EXPECT_EQ(th::quantiles({1.0, 2.0}).median, 1.5);
}

TEST(MarginExperiment, IdenticalModelsGiveIdenticalHistograms) {
  SynthSpec s;
  s.n_pretrain = 400;
  const SynthData d = gen_synth(s);
  PretrainConfig pc;
  pc.epochs = 3;
  const TinyClassifier m = pretrain(d.pretrain, pc);
  const auto h = th::margin_experiment(m, m, d.pretrain);
  EXPECT_EQ(h.ce_counts, h.edl_counts);
  EXPECT_EQ(h.ce_counts.size(), 64u);
  EXPECT_EQ(h.ce.median, h.edl.median);
  std::size_t total = 0;
  for (auto c : h.ce_counts) total += c;
  EXPECT_EQ(total, 400u);
  EXPECT_THROW(th::margin_experiment(m, m, DataSplit{}), Error);
}

TEST(Suite, MandatoryChecksPass) {
  const auto rep = th::run_suite(th::SuiteConfig{});
  for (const auto& c : rep.checks) {
    if (c.mandatory) EXPECT_TRUE(c.passed) << c.name;
  }
  EXPECT_TRUE(rep.all_mandatory_passed());
  EXPECT_NE(rep.to_text().find("alpha0_bounded"), std::string::npos);
  EXPECT_NE(rep.to_json().find("\"checks\""), std::string::npos);
  EXPECT_FALSE(rep.interpretation.empty());
}

}  // namespace
