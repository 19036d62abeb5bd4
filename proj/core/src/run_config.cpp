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

#include "etn/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "binary.hpp"
#include "etn/error.hpp"

namespace etn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(ErrorCategory::kConfig, "config: bad value '" + value + "' for key '" + key + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCategory::kConfig, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    TrainConfig& t = cfg.train;
    if (key == "family") {
      cfg.family = parse_family(value);
    } else if (key == "prior_mode") {
      t.prior.mode = parse_number<double>(key, value);
    } else if (key == "prior_var") {
      t.prior.variance = parse_number<double>(key, value);
    } else if (key == "mc_samples") {
      t.mc_samples = parse_number<int>(key, value);
    } else if (key == "lambda") {
      t.lambda = parse_number<double>(key, value);
    } else if (key == "nu") {
      t.nu = parse_number<double>(key, value);
    } else if (key == "lr") {
      t.learning_rate = parse_number<double>(key, value);
    } else if (key == "epochs") {
      t.epochs = parse_number<int>(key, value);
    } else if (key == "batch") {
      t.batch_size = parse_number<int>(key, value);
    } else if (key == "hidden_dim") {
      cfg.hidden_dim = parse_number<int>(key, value);
    } else if (key == "seed") {
      t.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "odir_weight") {
      t.odir_weight = parse_number<double>(key, value);
    } else {
      fail(ErrorCategory::kConfig, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.train.prior.family = cfg.family;
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return parse(std::string(bytes.begin(), bytes.end()));
  } catch (const Error& e) {
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

void RunConfig::validate() const {
  train.validate();
  if (hidden_dim < 1) fail(ErrorCategory::kConfig, "hidden_dim must be >= 1");
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "family = " << family_name(family) << '\n'
      << "prior_mode = " << fmt(train.prior.mode) << '\n'
      << "prior_var = " << fmt(train.prior.variance) << '\n'
      << "mc_samples = " << train.mc_samples << '\n'
      << "lambda = " << fmt(train.lambda) << '\n'
      << "nu = " << fmt(train.nu) << '\n'
      << "lr = " << fmt(train.learning_rate) << '\n'
      << "epochs = " << train.epochs << '\n'
      << "batch = " << train.batch_size << '\n'
      << "hidden_dim = " << hidden_dim << '\n'
      << "seed = " << train.seed << '\n'
      << "odir_weight = " << fmt(train.odir_weight) << '\n';
  return out.str();
}

}  // namespace etn
