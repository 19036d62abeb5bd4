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

#include "binary.hpp"
#include "etn/error.hpp"
#include "etn/etn.hpp"

namespace etn::checkpoint {
namespace {

int as_int(double v, const char* what) {
  if (!(v >= 0.0) || v > 1e9 || std::floor(v) != v) {
    fail(ErrorCategory::kFormat, std::string("ETNC: bad ") + what);
  }
  return static_cast<int>(v);
}

void expect_size(const std::vector<double>& a, std::size_t n, const char* what) {
  if (a.size() != n) fail(ErrorCategory::kFormat, std::string("ETNC: wrong length for ") + what);
}

}  // namespace

std::vector<std::uint8_t> save(const EtnModel& model) {
  detail::Writer w;
  w.magic("ETNC");
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(model.family()));
  const MlpSpec& s = model.spec();
  const std::vector<double> dims{static_cast<double>(s.input_dim), static_cast<double>(s.hidden_dim),
                                 static_cast<double>(s.num_layers),
                                 static_cast<double>(model.num_classes())};
  const std::vector<double> evidence{model.nu(), model.lambda(),
                                     static_cast<double>(EvidenceFunction::kSoftplus)};
  const std::vector<double> prior{model.prior().mode, model.prior().variance, model.odir_weight()};
  w.f64_array(dims);
  w.f64_array(evidence);
  w.f64_array(prior);
  w.f64_array(model.feature_mean);
  w.f64_array(model.feature_std);
  w.f64_array(model.b_raw);
  w.f64_array(model.params);
  return w.take();
}

EtnModel load(std::span<const std::uint8_t> bytes) {
  detail::Reader r(bytes, "ETNC");
  r.expect_magic("ETNC");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    fail(ErrorCategory::kVersion, "ETNC: unsupported version " + std::to_string(version));
  }
  const auto tag = r.get<std::uint8_t>();
  if (tag > static_cast<std::uint8_t>(Family::kMatrix)) {
    fail(ErrorCategory::kFormat, "ETNC: unknown family tag " + std::to_string(tag));
  }
  const auto dims = r.f64_array();
  const auto evidence = r.f64_array();
  const auto prior = r.f64_array();
  auto mean = r.f64_array();
  auto sd = r.f64_array();
  auto b_raw = r.f64_array();
  auto params = r.f64_array();
  r.expect_end();

  expect_size(dims, 4, "dims");
  expect_size(evidence, 3, "evidence");
  expect_size(prior, 3, "prior");
  if (evidence[2] != static_cast<double>(EvidenceFunction::kSoftplus)) {
    fail(ErrorCategory::kFormat, "ETNC: unknown evidence function");
  }
  const MlpSpec spec{as_int(dims[0], "input_dim"), as_int(dims[1], "hidden_dim"),
                     as_int(dims[2], "num_layers")};
  const int c = as_int(dims[3], "num_classes");
  const auto family = static_cast<Family>(tag);
  PriorSpec ps{prior[0], prior[1], family};
  EtnModel model = [&] {
    try {
      return EtnModel(family, spec, c, ps, evidence[0], evidence[1], prior[2]);
    } catch (const Error& e) {
      throw Error(ErrorCategory::kFormat, std::string("ETNC: invalid header: ") + e.what());
    }
  }();
  expect_size(mean, model.feature_mean.size(), "feature_mean");
  expect_size(sd, model.feature_std.size(), "feature_std");
  expect_size(b_raw, model.b_raw.size(), "b_raw");
  expect_size(params, model.params.size(), "params");
  model.feature_mean = std::move(mean);
  model.feature_std = std::move(sd);
  model.b_raw = std::move(b_raw);
  model.params = std::move(params);
  return model;
}

EtnModel load(std::span<const std::uint8_t> bytes, Family expected) {
  EtnModel model = load(bytes);
  if (model.family() != expected) {
    fail(ErrorCategory::kConfig, "checkpoint family '" + std::string(family_name(model.family())) +
                                     "' does not match requested '" +
                                     std::string(family_name(expected)) + "'");
  }
  return model;
}

void save_file(const std::filesystem::path& path, const EtnModel& model) {
  detail::write_file(path, save(model));
}

EtnModel load_file(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return load(bytes);
  } catch (const Error& e) {
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

}  // namespace etn::checkpoint
