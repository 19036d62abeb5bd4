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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace etn {

/// One named array of an ETNB file.
///
/// Layout (all little-endian): "ETNB", u32 version = 1, u32 array count, then
/// per array: u16 name length, UTF-8 name, u8 dtype (0 = f32, 1 = i64),
/// u8 rank, rank x u64 dims, row-major payload.
struct NamedArray {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::variant<std::vector<float>, std::vector<std::int64_t>> data;

  std::uint64_t element_count() const;
};

struct LogitRecord {
  std::vector<double> features;
  std::vector<double> logits;
  int label = -1;  // -1 when unlabeled
};

/// Exported model outputs: "features" [N,H] f32, "logits" [N,C] f32 and
/// optional "labels" [N] i64.
struct LogitBundle {
  std::size_t n = 0;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  std::vector<float> features;
  std::vector<float> logits;
  std::optional<std::vector<std::int64_t>> labels;

  std::span<const float> feature_row(std::size_t i) const;
  std::span<const float> logit_row(std::size_t i) const;
  LogitRecord record(std::size_t i) const;
  std::vector<LogitRecord> records() const;
  bool has_labels() const { return labels.has_value(); }

  /// Throws kFormat when array sizes are inconsistent.
  void validate() const;
};

/// Raw synthetic split: "inputs" [N,D] f32 and "labels" [N] i64.
struct DataSplit {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<float> inputs;
  std::vector<std::int64_t> labels;

  std::span<const float> row(std::size_t i) const;
};

namespace bundle {

inline constexpr std::uint32_t kVersion = 1;

std::vector<std::uint8_t> encode(const std::vector<NamedArray>& arrays);
std::vector<NamedArray> decode(std::span<const std::uint8_t> bytes);

std::vector<NamedArray> to_arrays(const LogitBundle& b);
LogitBundle logit_bundle_from_arrays(const std::vector<NamedArray>& arrays);

std::vector<NamedArray> to_arrays(const DataSplit& s);
DataSplit data_split_from_arrays(const std::vector<NamedArray>& arrays);

void write(const std::filesystem::path& path, const LogitBundle& b);
void write(const std::filesystem::path& path, const DataSplit& s);
LogitBundle read_logit_bundle(const std::filesystem::path& path);
DataSplit read_data_split(const std::filesystem::path& path);

/// Text fixture: header f0..f{H-1},z0..z{C-1}[,label]; one row per sample.
LogitBundle read_csv(const std::filesystem::path& path);
LogitBundle parse_csv(const std::string& text);

}  // namespace bundle
}  // namespace etn
