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
#include <random>

#include <gtest/gtest.h>

#include "etn/dirichlet.hpp"
#include "etn/error.hpp"
#include "etn/etn.hpp"
#include "etn/pipeline.hpp"
#include "etn/specfun.hpp"
#include "oracles.hpp"

using namespace etn;

namespace {

std::vector<LogitRecord> separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<LogitRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    const double s = y == 0 ? -1.0 : 1.0;
    out[i].features = {2.0 * s + noise(eng), noise(eng)};
    out[i].logits = {-3.0 * s + noise(eng), 3.0 * s + noise(eng)};
    out[i].label = y;
  }
  return out;
}

// Zero weights everywhere; each head then outputs its final bias.
void set_output_biases(EtnModel& m, const std::vector<double>& biases) {
  std::fill(m.params.begin(), m.params.end(), 0.0);
  const auto& heads = m.heads();
  for (std::size_t k = 0; k < heads.size(); ++k) {
    const std::size_t end = m.head_offset(k) + heads[k].num_params();
    const auto width = static_cast<std::size_t>(heads[k].output_dim());
    for (std::size_t j = 0; j < width; ++j) m.params[end - width + j] = biases[k];
  }
}

TEST(MlpSpec, Validate) {
  EXPECT_THROW((MlpSpec{0, 4, 2}.validate()), Error);
  EXPECT_THROW((MlpSpec{2, 0, 2}.validate()), Error);
  EXPECT_THROW((MlpSpec{2, 4, 0}.validate()), Error);
}

TEST(EtnModel, HeadLayout) {
  const EtnModel s(Family::kScalar, {5, 8, 2}, 4, {});
  ASSERT_EQ(s.heads().size(), 2u);
  EXPECT_EQ(s.heads()[0].output_dim(), 1);
  const EtnModel v(Family::kVector, {5, 8, 2}, 4, {});
  EXPECT_EQ(v.heads()[1].output_dim(), 4);
  const EtnModel m(Family::kMatrix, {5, 8, 3}, 4, {});
  ASSERT_EQ(m.heads().size(), 3u);
  EXPECT_EQ(m.heads()[0].output_dim(), 16);
  EXPECT_EQ(m.heads()[1].output_dim(), 10);
  EXPECT_EQ(m.heads()[2].num_layers(), 3u);
  for (double b : s.prior_belief()) EXPECT_NEAR(b, 1.0, 1e-15);
}

TEST(PredictVariational, ZeroNetwork) {
  EtnModel m(Family::kScalar, {2, 3, 2}, 3, {});
  const auto q = std::get<GammaParams>(m.predict_variational(std::vector<double>{0.4, -2.0}));
  EXPECT_NEAR(q.shape, std::log(2.0) + 1e-4, 1e-15);
  EXPECT_NEAR(q.rate, std::log(2.0) + 1e-4, 1e-15);
}

TEST(PredictVariational, HandComputed) {
  EtnModel m(Family::kScalar, {2, 3, 2}, 3, {});
  // shape head: W1 (3x2, column-major), b1, W2 (1x3), b2; rate head zero.
  const std::vector<double> shape_head{0.5, -1.0, 2.0, 1.0, 0.0, -0.5, 0.1, 0.2, -0.3, 1.0, 2.0, -1.0, 0.25};
  std::fill(m.params.begin(), m.params.end(), 0.0);
  std::copy(shape_head.begin(), shape_head.end(), m.params.begin());
  m.feature_mean = {1.0, 0.0};
  m.feature_std = {2.0, 1.0};
  // x = ((3 - 1) / 2, 0.5) = (1, 0.5)
  // W1 x + b1 = (0.5 + 0.5 + 0.1, -1 + 0 + 0.2, 2 - 0.25 - 0.3) = (1.1, -0.8, 1.45)
  // relu -> (1.1, 0, 1.45); W2 h + b2 = 1.1 - 1.45 + 0.25 = -0.1
  const auto q = std::get<GammaParams>(m.predict_variational(std::vector<double>{3.0, 0.5}));
  EXPECT_NEAR(q.shape, specfun::softplus(-0.1) + 1e-4, 1e-14);
  EXPECT_NEAR(q.rate, std::log(2.0) + 1e-4, 1e-15);
  EXPECT_THROW(m.predict_variational(std::vector<double>{1.0}), Error);
}

TEST(PredictVariational, AlwaysPositive) {
  std::mt19937_64 eng(1);
  std::normal_distribution<double> n(0.0, 30.0);
  for (Family f : {Family::kScalar, Family::kVector, Family::kMatrix}) {
    TrainConfig cfg;
    EtnModel m = make_model(f, {3, 6, 2}, 3, cfg);
    for (double& w : m.params) w *= 10.0;
    for (int k = 0; k < 200; ++k) {
      const std::vector<double> x{n(eng), n(eng), n(eng)};
      EXPECT_NO_THROW(variational::validate(m.predict_variational(x), 3));
    }
  }
}

TEST(LossBatch, RequiresLabels) {
  TrainConfig cfg;
  const EtnModel m = make_model(Family::kScalar, {2, 3, 2}, 2, cfg);
  auto batch = separable(4, 1);
  batch[2].label = -1;
  RandomStream r(1);
  try {
    loss_batch(m, batch, 4, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kInvalidArgument);
  }
  EXPECT_THROW(loss_batch(m, std::span<const LogitRecord>{}, 4, r), Error);
}

TEST(LossBatch, PointMassMatchesDeterministicLoss) {
  TrainConfig cfg;
  cfg.lambda = 0.0;
  EtnModel m = make_model(Family::kScalar, {2, 3, 2}, 3, cfg);
  const double big = 1e12;  // shape = rate: A concentrates at 1
  set_output_biases(m, {big, big});
  const LogitRecord r{{0.0, 0.0}, {2.0, -1.0, 0.5}, 0};
  RandomStream rng(3);
  const double loss = loss_batch(m, std::span(&r, 1), 200, rng, false).loss.total;
  const auto alpha = edl::logits_to_alpha(r.logits, m.prior_belief());
  const double det = -edl::elbo_reconstruction(alpha, edl::target_alpha(0, 3, 1e4));
  EXPECT_NEAR(loss, det, 0.01 * std::abs(det));
}

TEST(LossBatch, TargetReconstructionIsEntropy) {
  TrainConfig cfg;
  cfg.lambda = 0.0;
  EtnModel m = make_model(Family::kScalar, {2, 3, 2}, 4, cfg);
  set_output_biases(m, {1e12, 1e12});
  const LogitRecord r{{0.0, 0.0}, {-1000.0, specfun::softplus_inv(1e4 - 1.0), -1000.0, -1000.0}, 1};
  RandomStream rng(4);
  const double loss = loss_batch(m, std::span(&r, 1), 10, rng, false).loss.total;
  const double de = dirichlet::differential_entropy(edl::target_alpha(1, 4, 1e4));
  EXPECT_NEAR(loss, de, 1e-3 * std::abs(de));
}

TEST(LossBatch, BreakdownAddsUp) {
  for (Family f : {Family::kScalar, Family::kVector, Family::kMatrix}) {
    TrainConfig cfg;
    cfg.lambda = 0.3;
    EtnModel m = make_model(f, {2, 4, 2}, 2, cfg);
    const auto batch = separable(6, 2);
    m.fit_feature_stats(batch);
    RandomStream r(5);
    const auto l = loss_batch(m, batch, 8, r, false).loss;
    EXPECT_GE(l.kl, 0.0);
    EXPECT_NEAR(l.total, l.recon + 0.3 * l.kl + l.odir, 1e-9 * std::abs(l.total));
    if (f != Family::kMatrix) EXPECT_EQ(l.odir, 0.0);
  }
}

TEST(LossBatch, ScalarPriorBeliefGradientIsTied) {
  TrainConfig cfg;
  EtnModel m = make_model(Family::kScalar, {2, 3, 2}, 3, cfg);
  const auto batch = separable(5, 3);
  std::vector<LogitRecord> b3;
  for (const auto& r : batch) b3.push_back({r.features, {r.logits[0], r.logits[1], 0.5}, r.label});
  RandomStream r(6);
  const auto g = loss_batch(m, b3, 8, r, true);
  EXPECT_EQ(g.grad_b_raw[0], g.grad_b_raw[1]);
  EXPECT_EQ(g.grad_b_raw[0], g.grad_b_raw[2]);
}

TEST(LossBatch, VectorGradientMatchesFiniteDifference) {
  TrainConfig cfg;
  EtnModel m = make_model(Family::kVector, {2, 3, 2}, 2, cfg);
  const auto batch = separable(3, 4);
  const RandomStream base(8);
  RandomStream r = base;
  const auto g = loss_batch(m, batch, 16, r, true);
  for (std::size_t k = 0; k < m.params.size(); k += 3) {
    const double fd = oracle::central_difference(
        [&](double v) {
          EtnModel x = m;
          x.params[k] = v;
          RandomStream rr = base;
          return loss_batch(x, batch, 16, rr, false).loss.total;
        },
        m.params[k], 1e-5);
    EXPECT_NEAR(g.grad_params[k], fd, 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Train, LossDecreasesOnSeparableData) {
  const auto data = separable(200, 5);
  TrainConfig cfg;
  cfg.epochs = 50;
  EtnModel m = make_model(Family::kScalar, {2, 16, 2}, 2, cfg);
  const auto h = train(m, data, cfg);
  ASSERT_EQ(h.history.size(), 51u);
  EXPECT_EQ(h.history[0].epoch, 0);
  EXPECT_LT(h.history.back().loss.total, h.history.front().loss.total);
  EXPECT_GE(h.best_epoch, 1);
  EXPECT_EQ(h.best_loss, h.history[static_cast<std::size_t>(h.best_epoch)].loss.total);
  for (const auto& e : h.history) {
    EXPECT_GE(e.loss.kl, 0.0);
    EXPECT_TRUE(std::isfinite(e.loss.recon));
  }
  for (double b : m.prior_belief()) EXPECT_GT(b, 0.0);
}

TEST(Train, BitIdenticalPerSeed) {
  const auto data = separable(100, 6);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 9;
  for (Family f : {Family::kScalar, Family::kMatrix}) {
    EtnModel a = make_model(f, {2, 8, 2}, 2, cfg), b = make_model(f, {2, 8, 2}, 2, cfg);
    train(a, data, cfg);
    train(b, data, cfg);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.b_raw, b.b_raw);
  }
}

TEST(Train, ConfigValidation) {
  TrainConfig cfg;
  cfg.learning_rate = -1e-3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.mc_samples = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.nu = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
}

class DefaultTask : public ::testing::Test {
 protected:
  static pipeline::Prepared& data(std::uint64_t seed) {
    static std::map<std::uint64_t, pipeline::Prepared> cache;
    auto it = cache.find(seed);
    if (it == cache.end()) {
      SynthSpec s;
      s.seed = seed;
      PretrainConfig pc;
      pc.seed = seed;
      it = cache.emplace(seed, pipeline::prepare(s, pc)).first;
    }
    return it->second;
  }
};

TEST_F(DefaultTask, LossDecreasesOverFirstFiveEpochs) {
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto records = data(seed).adapt.records();
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.epochs = 5;
    EtnModel m = make_model(Family::kScalar, {static_cast<int>(data(seed).adapt.feature_dim)}, 4, cfg);
    const auto h = train(m, records, cfg);
    for (int e = 1; e <= 5; ++e) {
      EXPECT_LT(h.history[e].loss.total, h.history[e - 1].loss.total) << "seed " << seed << " epoch " << e;
    }
  }
}

TEST_F(DefaultTask, TrainingRaisesIdConcentration) {
  const auto records = data(0).adapt.records();
  TrainConfig cfg;
  EtnModel m = make_model(Family::kScalar, {static_cast<int>(data(0).adapt.feature_dim)}, 4, cfg);
  m.fit_feature_stats(records);
  auto mean_um = [&](const EtnModel& model) {
    double s = 0.0;
    for (const auto& p : infer_all(model, records, 20, 1)) s += p.scores.um;
    return s / static_cast<double>(records.size());
  };
  const double before = mean_um(m);
  train(m, records, cfg);
  EXPECT_GT(mean_um(m), before);
}

TEST(Infer, DegenerateMarginalisation) {
  TrainConfig cfg;
  EtnModel m = make_model(Family::kScalar, {2, 3, 2}, 3, cfg);
  set_output_biases(m, {1e15, 1e15});
  const LogitRecord r{{0.1, 0.2}, {1.5, -0.5, 0.2}, -1};
  RandomStream rng(1);
  const auto inf = infer(m, r, 1, rng);
  const auto alpha = edl::logits_to_alpha(r.logits, EvidenceConfig::standard(3));
  const auto mean = dirichlet::mean(alpha);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(inf.p[i], mean[i], 1e-9);
  EXPECT_NEAR(inf.scores.mp, dirichlet::max_probability(alpha), 1e-9);
  EXPECT_NEAR(inf.scores.um, alpha.alpha0(), 1e-6);
  EXPECT_NEAR(inf.scores.mi, dirichlet::mutual_information(alpha), 1e-9);
  EXPECT_NEAR(inf.scores.de, dirichlet::differential_entropy(alpha), 1e-7);
}

TEST(Infer, SimplexAndScalarArgmax) {
  std::mt19937_64 eng(2);
  std::normal_distribution<double> n(0.0, 3.0);
  for (Family f : {Family::kScalar, Family::kVector, Family::kMatrix}) {
    TrainConfig cfg;
    EtnModel m = make_model(f, {2, 5, 2}, 4, cfg);
    RandomStream rng(3);
    for (int k = 0; k < 100; ++k) {
      const LogitRecord r{{n(eng), n(eng)}, {n(eng), n(eng), n(eng), n(eng)}, -1};
      const auto inf = infer(m, r, 5, rng);
      double s = 0.0;
      for (double v : inf.p.pi()) {
        EXPECT_GE(v, 0.0);
        s += v;
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
      if (f == Family::kScalar) {
        EXPECT_EQ(inf.p.argmax(),
                  static_cast<std::size_t>(std::max_element(r.logits.begin(), r.logits.end()) - r.logits.begin()));
      }
    }
  }
}

TEST(Infer, MoreSamplesReduceVariance) {
  TrainConfig cfg;
  cfg.prior.variance = 50.0;
  EtnModel m = make_model(Family::kVector, {2, 5, 2}, 3, cfg);
  const LogitRecord r{{0.3, -0.4}, {1.0, 0.2, -0.5}, -1};
  auto spread = [&](int mc) {
    double s = 0.0, s2 = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      RandomStream rng(1000 + static_cast<std::uint64_t>(rep));
      const double p0 = infer(m, r, mc, rng).p[0];
      s += p0;
      s2 += p0 * p0;
    }
    return s2 / 100 - (s / 100) * (s / 100);
  };
  const double v1 = spread(1), v8 = spread(8), v64 = spread(64);
  EXPECT_GT(v1, v8);
  EXPECT_GT(v8, v64);
}

TEST(Infer, AllUsesPerSampleStreams) {
  TrainConfig cfg;
  const EtnModel m = make_model(Family::kVector, {2, 5, 2}, 2, cfg);
  const auto recs = separable(10, 7);
  const auto all = infer_all(m, recs, 4, 42);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    RandomStream rng = RandomStream::derive(42, "etn.infer", i);
    const auto one = infer(m, recs[i], 4, rng);
    EXPECT_EQ(one.p[0], all[i].p[0]);
    EXPECT_EQ(one.scores.um, all[i].scores.um);
  }
}

TEST(FeatureStats, Standardize) {
  EtnModel m(Family::kScalar, {2, 3, 2}, 2, {});
  std::vector<LogitRecord> recs{{{1.0, 5.0}, {0, 0}, 0}, {{3.0, 5.0}, {0, 0}, 1}};
  m.fit_feature_stats(recs);
  EXPECT_EQ(m.feature_mean, (std::vector<double>{2.0, 5.0}));
  EXPECT_EQ(m.feature_std, (std::vector<double>{1.0, 1.0}));  // constant column falls back to 1
  EXPECT_EQ(m.standardize(std::vector<double>{4.0, 6.0}), (std::vector<double>{2.0, 1.0}));
}

}  // namespace
