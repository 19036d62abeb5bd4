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

#include <gtest/gtest.h>

#include "etn/error.hpp"
#include "etn/run_config.hpp"

using namespace etn;

namespace {

ErrorCategory category_of(const std::string& text) {
  try {
    RunConfig::parse(text);
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorCategory::kUsage;
}

TEST(RunConfig, Defaults) {
  const RunConfig c = RunConfig::parse("");
  EXPECT_EQ(c.family, Family::kScalar);
  EXPECT_EQ(c.train.prior.variance, 5.0);
  EXPECT_EQ(c.train.mc_samples, 20);
  EXPECT_EQ(c.train.nu, 1e4);
  EXPECT_EQ(c.train.learning_rate, 1e-3);
  EXPECT_EQ(c.hidden_dim, 256);
}

TEST(RunConfig, AllKeys) {
  const RunConfig c = RunConfig::parse(
      "# comment\n"
      "family = matrix\n"
      "prior_mode=5\n"
      "  prior_var = 2.5  \n"
      "\n"
      "mc_samples = 10 # trailing\n"
      "lambda = 0.5\nnu = 100\nlr = 0.01\nepochs = 7\nbatch = 16\nhidden_dim = 32\nseed = 3\nodir_weight = 0.2\n");
  EXPECT_EQ(c.family, Family::kMatrix);
  EXPECT_EQ(c.train.prior.mode, 5.0);
  EXPECT_EQ(c.train.prior.variance, 2.5);
  EXPECT_EQ(c.train.mc_samples, 10);
  EXPECT_EQ(c.train.lambda, 0.5);
  EXPECT_EQ(c.train.nu, 100.0);
  EXPECT_EQ(c.train.learning_rate, 0.01);
  EXPECT_EQ(c.train.epochs, 7);
  EXPECT_EQ(c.train.batch_size, 16);
  EXPECT_EQ(c.hidden_dim, 32);
  EXPECT_EQ(c.train.seed, 3u);
  EXPECT_EQ(c.train.odir_weight, 0.2);
}

TEST(RunConfig, TextRoundTrip) {
  const RunConfig c = RunConfig::parse("family = vector\nprior_mode = 2.75\nlr = 0.0003\nseed = 11\n");
  const RunConfig back = RunConfig::parse(c.to_text());
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.family, Family::kVector);
  EXPECT_EQ(back.train.prior.mode, 2.75);
  EXPECT_EQ(back.train.learning_rate, 0.0003);
}

TEST(RunConfig, Rejections) {
  EXPECT_EQ(category_of("temperature = 2\n"), ErrorCategory::kConfig);
  EXPECT_EQ(category_of("lr = -0.001\n"), ErrorCategory::kConfig);
  EXPECT_EQ(category_of("lr = fast\n"), ErrorCategory::kConfig);
  EXPECT_EQ(category_of("epochs = 2.5\n"), ErrorCategory::kConfig);
  EXPECT_EQ(category_of("family = tensor\n"), ErrorCategory::kConfig);
  EXPECT_EQ(category_of("mc_samples = 0\n"), ErrorCategory::kConfig);
  EXPECT_EQ(category_of("prior_var = 0\n"), ErrorCategory::kConfig);
  EXPECT_EQ(category_of("just words\n"), ErrorCategory::kConfig);
}

TEST(RunConfig, MissingFile) {
  try {
    RunConfig::load("/nonexistent/run.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIo);
  }
}

}  // namespace
