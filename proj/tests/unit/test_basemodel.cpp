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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "etn/basemodel.hpp"
#include "etn/bundle.hpp"
#include "etn/edl.hpp"
#include "etn/error.hpp"
#include "etn/metrics.hpp"
#include "etn/static_scaling.hpp"

using namespace etn;

namespace {

struct Trained {
  SynthData data;
  TinyClassifier ce;
  TinyClassifier edl;
};

const Trained& trained(std::uint64_t seed) {
  static std::map<std::uint64_t, Trained> cache;
  auto it = cache.find(seed);
  if (it == cache.end()) {
    SynthSpec s;
    s.seed = seed;
    SynthData d = gen_synth(s);
    PretrainConfig ce, edl;
    ce.seed = edl.seed = seed;
    edl.loss = PretrainLoss::kEdl;
    TinyClassifier m_ce = pretrain(d.pretrain, ce);
    TinyClassifier m_edl = pretrain(d.pretrain, edl);
    it = cache.emplace(seed, Trained{std::move(d), std::move(m_ce), std::move(m_edl)}).first;
  }
  return it->second;
}

TEST(SynthSpec, Validate) {
  SynthSpec s;
  s.feature_dim = 1;
  EXPECT_THROW(s.validate(), Error);
  s = SynthSpec{};
  s.sigma = 0.0;
  EXPECT_THROW(s.validate(), Error);
  s = SynthSpec{};
  s.n_test = 3;
  EXPECT_THROW(s.validate(), Error);
}

TEST(GenSynth, DeterministicBalancedAndShaped) {
  SynthSpec s;
  s.seed = 5;
  const SynthData a = gen_synth(s), b = gen_synth(s);
  EXPECT_EQ(bundle::encode(bundle::to_arrays(a.test)), bundle::encode(bundle::to_arrays(b.test)));
  EXPECT_EQ(a.pretrain.n, 2000u);
  EXPECT_EQ(a.ood.n, 1000u);
  std::vector<int> counts(4, 0);
  for (auto y : a.adapt.labels) ++counts[static_cast<std::size_t>(y)];
  for (int c : counts) EXPECT_EQ(c, 125);
  s.seed = 6;
  EXPECT_NE(gen_synth(s).test.inputs, a.test.inputs);
}

TEST(GenSynth, SplitsDisjoint) {
  SynthSpec s;
  const SynthData d = gen_synth(s);
  std::set<std::pair<float, float>> seen;
  for (const DataSplit* split : {&d.pretrain, &d.adapt, &d.test}) {
    for (std::size_t i = 0; i < split->n; ++i) {
      EXPECT_TRUE(seen.insert({split->row(i)[0], split->row(i)[1]}).second);
    }
  }
}

TEST(GenSynth, OodShiftMovesMeans) {
  SynthSpec s;
  const SynthData d = gen_synth(s);
  double id_x = 0.0, ood_x = 0.0;
  for (std::size_t i = 0; i < d.test.n; ++i) id_x += d.test.row(i)[0] / static_cast<double>(d.test.n);
  for (std::size_t i = 0; i < d.ood.n; ++i) ood_x += d.ood.row(i)[0] / static_cast<double>(d.ood.n);
  EXPECT_NEAR(ood_x - id_x, 6.0, 0.2);
  const auto means = class_means(s);
  EXPECT_NEAR(std::hypot(means[1][0], means[1][1]), 4.0, 1e-12);
}

TEST(Pretrain, LinearProbeOnTightBlobs) {
  SynthSpec s;
  s.sigma = 0.3;
  s.radius = 3.0;
  const SynthData d = gen_synth(s);
  PretrainConfig pc;
  pc.hidden_dim = 8;
  EXPECT_GE(accuracy(pretrain(d.pretrain, pc), d.test), 0.95);
}

TEST(Pretrain, DefaultAccuracy) {
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto& t = trained(seed);
    EXPECT_GE(accuracy(t.ce, t.data.test), 0.95) << seed;
    EXPECT_GE(accuracy(t.edl, t.data.test), 0.90) << seed;
  }
}

TEST(Pretrain, EdlMarginsExceedCe) {
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto& t = trained(seed);
    std::vector<double> ce, edl;
    for (std::size_t i = 0; i < t.data.pretrain.n; ++i) {
      const int y = static_cast<int>(t.data.pretrain.labels[i]);
      ce.push_back(edl::margin(t.ce.logits(t.data.pretrain.row(i)), y));
      edl.push_back(edl::margin(t.edl.logits(t.data.pretrain.row(i)), y));
    }
    std::nth_element(ce.begin(), ce.begin() + ce.size() / 2, ce.end());
    std::nth_element(edl.begin(), edl.begin() + edl.size() / 2, edl.end());
    EXPECT_GT(edl[edl.size() / 2], ce[ce.size() / 2]) << seed;
  }
}

TEST(Pretrain, CeConcentrationSpreadsMore) {
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto& t = trained(seed);
    auto ratio = [&](const TinyClassifier& m) {
      double lo = INFINITY, hi = 0.0;
      for (std::size_t i = 0; i < t.data.test.n; ++i) {
        const double a0 = edl::logits_to_alpha(m.logits(t.data.test.row(i)), EvidenceConfig::standard(4)).alpha0();
        lo = std::min(lo, a0);
        hi = std::max(hi, a0);
      }
      return hi / lo;
    };
    EXPECT_GT(ratio(t.ce), ratio(t.edl)) << seed;
  }
}

TEST(Pretrain, BadLossName) {
  EXPECT_EQ(parse_pretrain_loss("ce"), PretrainLoss::kCrossEntropy);
  EXPECT_EQ(parse_pretrain_loss("edl"), PretrainLoss::kEdl);
  try {
    parse_pretrain_loss("mse");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kUsage);
  }
}

TEST(Export, ReproducesForwardPass) {
  const auto& t = trained(0);
  const LogitBundle b = export_bundle(t.ce, t.data.test, true);
  EXPECT_EQ(b.feature_dim, 32u);
  EXPECT_EQ(b.num_classes, 4u);
  for (std::size_t i = 0; i < 100; ++i) {
    std::vector<double> h, z;
    t.ce.forward(t.data.test.row(i * 7), h, z);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(b.logit_row(i * 7)[j], static_cast<float>(z[j]));
    for (std::size_t j = 0; j < 32; ++j) EXPECT_EQ(b.feature_row(i * 7)[j], static_cast<float>(h[j]));
  }
  const LogitBundle back = bundle::logit_bundle_from_arrays(bundle::decode(bundle::encode(bundle::to_arrays(b))));
  EXPECT_EQ(back.features, b.features);
  EXPECT_FALSE(export_bundle(t.ce, t.data.ood, false).has_labels());
  DataSplit empty;
  empty.dim = 2;
  EXPECT_EQ(export_bundle(t.ce, empty, true).n, 0u);
}

TEST(Export, ShiftControlGivesPrevalenceAupr) {
  double mean = 0.0;
  for (std::uint64_t seed : {0, 1, 2}) {
    SynthSpec s;
    s.seed = seed;
    s.ood_shift = 0.0;
    const SynthData d = gen_synth(s);
    PretrainConfig pc;
    pc.seed = seed;
    const TinyClassifier m = pretrain(d.pretrain, pc);
    const auto id = export_bundle(m, d.test, true).records();
    const auto ood = export_bundle(m, d.ood, false).records();
    const auto pid = predict_static_all(identity_scaling(), id);
    const auto pood = predict_static_all(identity_scaling(), ood);
    const std::vector<NamedPredictions> sets{{"ood", pood}};
    mean += build_report(id, pid, sets).ood_mean.at("mi").aupr / 3.0;
  }
  EXPECT_NEAR(mean, 0.5, 0.05);
}

TEST(ModelFile, RoundTrip) {
  const auto& t = trained(1);
  const auto bytes = model_file::save(t.edl);
  const TinyClassifier back = model_file::load(bytes);
  EXPECT_EQ(back.params, t.edl.params);
  EXPECT_EQ(back.loss(), PretrainLoss::kEdl);
  EXPECT_EQ(model_file::save(back), bytes);
  auto bad = bytes;
  bad[4] = 3;
  EXPECT_THROW(model_file::load(bad), Error);
}

}  // namespace
