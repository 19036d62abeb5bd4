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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etn/error.hpp"

namespace etn::detail {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), c, c + n);
  }
  template <typename T>
  void put(T v) {
    bytes(&v, sizeof v);
  }
  void magic(std::string_view m) { bytes(m.data(), m.size()); }
  void f64_array(std::span<const double> a) {
    put<std::uint64_t>(a.size());
    bytes(a.data(), a.size() * sizeof(double));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> data, std::string what) : data_(data), what_(std::move(what)) {}

  void bytes(void* p, std::size_t n) {
    if (n > data_.size() - pos_) fail(ErrorCategory::kTruncated, what_ + ": unexpected end of data");
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T get() {
    T v;
    bytes(&v, sizeof v);
    return v;
  }
  void expect_magic(std::string_view m) {
    std::string got(m.size(), '\0');
    if (data_.size() < m.size()) fail(ErrorCategory::kTruncated, what_ + ": missing header");
    bytes(got.data(), got.size());
    if (got != m) fail(ErrorCategory::kFormat, what_ + ": bad magic");
  }
  std::vector<double> f64_array() {
    const auto n = get<std::uint64_t>();
    if (n > remaining() / sizeof(double)) {
      fail(ErrorCategory::kTruncated, what_ + ": array extends past end of data");
    }
    std::vector<double> a(n);
    bytes(a.data(), n * sizeof(double));
    return a;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const {
    if (remaining() != 0) fail(ErrorCategory::kFormat, what_ + ": trailing bytes");
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string what_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace etn::detail
