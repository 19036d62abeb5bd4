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

#include <filesystem>

#include <gtest/gtest.h>

#include "etn/error.hpp"
#include "etn/metrics.hpp"

using namespace etn;

namespace {

MetricsReport sample() {
  MetricsReport r;
  r.method = "etn";
  r.family = "scalar";
  r.seed = 7;
  r.n_id = 100;
  r.n_ood = {40, 60};
  r.accuracy = 0.97;
  r.base_accuracy = 0.97;
  r.confidence["mp"] = {0.991234567890123, 0.8};
  r.confidence["um"] = {0.5, std::nullopt};
  r.ood = {{"far", {{"mi", {0.7, 0.75}}, {"mp", {0.6, 0.1 + 0.2}}}}, {"near", {{"mi", {0.4, 0.45}}}}};
  r.ood_mean["mi"] = {0.55, 0.6};
  return r;
}

void expect_equal(const MetricsReport& a, const MetricsReport& b) {
  EXPECT_EQ(a.method, b.method);
  EXPECT_EQ(a.family, b.family);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.n_id, b.n_id);
  EXPECT_EQ(a.n_ood, b.n_ood);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.base_accuracy, b.base_accuracy);
  auto same = [](const std::map<std::string, MetricCell>& x, const std::map<std::string, MetricCell>& y) {
    ASSERT_EQ(x.size(), y.size());
    for (const auto& [k, v] : x) {
      EXPECT_EQ(v.aupr, y.at(k).aupr) << k;
      EXPECT_EQ(v.auroc, y.at(k).auroc) << k;
    }
  };
  same(a.confidence, b.confidence);
  same(a.ood_mean, b.ood_mean);
  ASSERT_EQ(a.ood.size(), b.ood.size());
  for (std::size_t i = 0; i < a.ood.size(); ++i) {
    EXPECT_EQ(a.ood[i].name, b.ood[i].name);
    same(a.ood[i].cells, b.ood[i].cells);
  }
}

TEST(Report, JsonRoundTripIsExact) {
  const MetricsReport r = sample();
  const std::string j = report::to_json(r);
  expect_equal(report::from_json(j), r);
  EXPECT_EQ(report::to_json(report::from_json(j)), j);
}

TEST(Report, TextIsSortedKeyValue) {
  const std::string t = report::to_text(sample());
  EXPECT_NE(t.find("accuracy = 0.970000\n"), std::string::npos);
  EXPECT_NE(t.find("ood.far.mi.aupr = 0.700000\n"), std::string::npos);
  EXPECT_NE(t.find("ood_mean.mi.auroc = 0.600000\n"), std::string::npos);
  std::istringstream in(t);
  std::string line, prev;
  while (std::getline(in, line)) {
    const std::string key = line.substr(0, line.find(" = "));
    EXPECT_LT(prev, key);
    prev = key;
  }
}

TEST(Report, MalformedJson) {
  for (const char* bad : {"", "{", "[]", R"({"method": 3})"}) {
    try {
      report::from_json(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::kFormat) << bad;
    }
  }
}

TEST(Report, Files) {
  const auto path = std::filesystem::temp_directory_path() / "etn_report_test.json";
  report::write_json(path, sample());
  expect_equal(report::read_json(path), sample());
  std::filesystem::remove(path);
  EXPECT_THROW(report::read_json(path), Error);
}

}  // namespace
