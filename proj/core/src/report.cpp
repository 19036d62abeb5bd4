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

#include <cstdio>
#include <sstream>

#include "binary.hpp"
#include "etn/error.hpp"
#include "etn/metrics.hpp"
#include "json.hpp"

namespace etn::report {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void cell_lines(std::map<std::string, std::string>& out, const std::string& prefix,
                const std::map<std::string, MetricCell>& cells) {
  for (const auto& [name, c] : cells) {
    out[prefix + name + ".aupr"] = num(c.aupr);
    out[prefix + name + ".auroc"] = c.auroc ? num(*c.auroc) : "null";
  }
}

json cells_json(const std::map<std::string, MetricCell>& cells) {
  json j = json::object();
  for (const auto& [name, c] : cells) {
    j[name] = {{"aupr", c.aupr}, {"auroc", c.auroc ? json(*c.auroc) : json(nullptr)}};
  }
  return j;
}

std::map<std::string, MetricCell> cells_from(const json& j) {
  std::map<std::string, MetricCell> cells;
  for (const auto& [name, v] : j.items()) {
    MetricCell c;
    c.aupr = v.at("aupr").get<double>();
    if (!v.at("auroc").is_null()) c.auroc = v.at("auroc").get<double>();
    cells[name] = c;
  }
  return cells;
}

}  // namespace

std::string to_text(const MetricsReport& r) {
  std::map<std::string, std::string> kv;
  kv["method"] = r.method;
  kv["family"] = r.family;
  kv["seed"] = std::to_string(r.seed);
  kv["n_id"] = std::to_string(r.n_id);
  kv["accuracy"] = num(r.accuracy);
  kv["base_accuracy"] = r.base_accuracy ? num(*r.base_accuracy) : "null";
  cell_lines(kv, "confidence.", r.confidence);
  for (std::size_t k = 0; k < r.ood.size(); ++k) {
    kv["ood." + r.ood[k].name + ".n"] = std::to_string(r.n_ood[k]);
    cell_lines(kv, "ood." + r.ood[k].name + ".", r.ood[k].cells);
  }
  cell_lines(kv, "ood_mean.", r.ood_mean);
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  return out.str();
}

std::string to_json(const MetricsReport& r) {
  json j;
  j["method"] = r.method;
  j["family"] = r.family;
  j["seed"] = r.seed;
  j["n_id"] = r.n_id;
  j["accuracy"] = r.accuracy;
  j["base_accuracy"] = r.base_accuracy ? json(*r.base_accuracy) : json(nullptr);
  j["confidence"] = cells_json(r.confidence);
  j["ood"] = json::array();
  for (std::size_t k = 0; k < r.ood.size(); ++k) {
    j["ood"].push_back({{"name", r.ood[k].name}, {"n", r.n_ood[k]}, {"cells", cells_json(r.ood[k].cells)}});
  }
  j["ood_mean"] = cells_json(r.ood_mean);
  return j.dump(2) + "\n";
}

MetricsReport from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    MetricsReport r;
    r.method = j.at("method").get<std::string>();
    r.family = j.at("family").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_id = j.at("n_id").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    if (!j.at("base_accuracy").is_null()) r.base_accuracy = j.at("base_accuracy").get<double>();
    r.confidence = cells_from(j.at("confidence"));
    for (const auto& o : j.at("ood")) {
      r.ood.push_back({o.at("name").get<std::string>(), cells_from(o.at("cells"))});
      r.n_ood.push_back(o.at("n").get<std::size_t>());
    }
    r.ood_mean = cells_from(j.at("ood_mean"));
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCategory::kFormat, std::string("report: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const MetricsReport& r) {
  const std::string s = to_json(r);
  detail::write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

MetricsReport read_json(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace etn::report
