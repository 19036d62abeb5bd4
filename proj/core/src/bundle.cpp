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

#include "etn/bundle.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "binary.hpp"
#include "etn/error.hpp"

namespace etn {
namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCategory::kIo, "read failed for '" + path.string() + "'");
  return data;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCategory::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace detail

std::uint64_t NamedArray::element_count() const {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::span<const float> LogitBundle::feature_row(std::size_t i) const {
  return std::span<const float>(features).subspan(i * feature_dim, feature_dim);
}

std::span<const float> LogitBundle::logit_row(std::size_t i) const {
  return std::span<const float>(logits).subspan(i * num_classes, num_classes);
}

LogitRecord LogitBundle::record(std::size_t i) const {
  LogitRecord r;
  const auto f = feature_row(i);
  const auto z = logit_row(i);
  r.features.assign(f.begin(), f.end());
  r.logits.assign(z.begin(), z.end());
  r.label = labels ? static_cast<int>((*labels)[i]) : -1;
  return r;
}

std::vector<LogitRecord> LogitBundle::records() const {
  std::vector<LogitRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(record(i));
  return out;
}

void LogitBundle::validate() const {
  if (features.size() != n * feature_dim) fail(ErrorCategory::kFormat, "features size mismatch");
  if (logits.size() != n * num_classes) fail(ErrorCategory::kFormat, "logits size mismatch");
  if (labels && labels->size() != n) fail(ErrorCategory::kFormat, "labels size mismatch");
  if (labels) {
    for (auto y : *labels) {
      if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
        fail(ErrorCategory::kFormat, "label out of range");
      }
    }
  }
}

std::span<const float> DataSplit::row(std::size_t i) const {
  return std::span<const float>(inputs).subspan(i * dim, dim);
}

namespace bundle {
namespace {

const NamedArray* find(const std::vector<NamedArray>& arrays, std::string_view name) {
  for (const auto& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const std::vector<float>& f32_matrix(const NamedArray* a, std::string_view name) {
  if (!a) fail(ErrorCategory::kFormat, "missing required array '" + std::string(name) + "'");
  if (a->dims.size() != 2) fail(ErrorCategory::kFormat, "'" + a->name + "' must have rank 2");
  const auto* v = std::get_if<std::vector<float>>(&a->data);
  if (!v) fail(ErrorCategory::kFormat, "'" + a->name + "' must be float32");
  return *v;
}

const std::vector<std::int64_t>& i64_vector(const NamedArray* a) {
  if (a->dims.size() != 1) fail(ErrorCategory::kFormat, "'" + a->name + "' must have rank 1");
  const auto* v = std::get_if<std::vector<std::int64_t>>(&a->data);
  if (!v) fail(ErrorCategory::kFormat, "'" + a->name + "' must be int64");
  return *v;
}

NamedArray f32(std::string name, std::vector<std::uint64_t> dims, const std::vector<float>& v) {
  return NamedArray{std::move(name), std::move(dims), v};
}

}  // namespace

std::vector<std::uint8_t> encode(const std::vector<NamedArray>& arrays) {
  detail::Writer w;
  w.magic("ETNB");
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    if (a.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      fail(ErrorCategory::kInvalidArgument, "array name too long");
    }
    if (a.dims.size() > 255) fail(ErrorCategory::kInvalidArgument, "array rank too large");
    w.put<std::uint16_t>(static_cast<std::uint16_t>(a.name.size()));
    w.bytes(a.name.data(), a.name.size());
    w.put<std::uint8_t>(static_cast<std::uint8_t>(a.data.index()));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(a.dims.size()));
    for (auto d : a.dims) w.put<std::uint64_t>(d);
    std::visit(
        [&](const auto& v) {
          if (v.size() != a.element_count()) {
            fail(ErrorCategory::kDimension, "array '" + a.name + "' payload does not match dims");
          }
          w.bytes(v.data(), v.size() * sizeof(v[0]));
        },
        a.data);
  }
  return w.take();
}

std::vector<NamedArray> decode(std::span<const std::uint8_t> bytes) {
  detail::Reader r(bytes, "ETNB");
  r.expect_magic("ETNB");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    fail(ErrorCategory::kVersion, "ETNB: unsupported version " + std::to_string(version));
  }
  const auto count = r.get<std::uint32_t>();
  std::vector<NamedArray> arrays;
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedArray a;
    a.name.resize(r.get<std::uint16_t>());
    r.bytes(a.name.data(), a.name.size());
    const auto dtype = r.get<std::uint8_t>();
    const auto rank = r.get<std::uint8_t>();
    a.dims.resize(rank);
    std::uint64_t count_elems = 1;
    for (auto& d : a.dims) {
      d = r.get<std::uint64_t>();
      if (d != 0 && count_elems > std::numeric_limits<std::uint64_t>::max() / d) {
        fail(ErrorCategory::kFormat, "ETNB: dims overflow");
      }
      count_elems *= d;
    }
    const std::size_t width = dtype == 0 ? 4 : 8;
    if (dtype > 1) fail(ErrorCategory::kFormat, "ETNB: unknown dtype " + std::to_string(dtype));
    if (count_elems > r.remaining() / width) {
      fail(ErrorCategory::kTruncated, "ETNB: array '" + a.name + "' extends past end of data");
    }
    if (dtype == 0) {
      std::vector<float> v(count_elems);
      r.bytes(v.data(), v.size() * 4);
      a.data = std::move(v);
    } else {
      std::vector<std::int64_t> v(count_elems);
      r.bytes(v.data(), v.size() * 8);
      a.data = std::move(v);
    }
    arrays.push_back(std::move(a));
  }
  r.expect_end();
  return arrays;
}

std::vector<NamedArray> to_arrays(const LogitBundle& b) {
  b.validate();
  std::vector<NamedArray> arrays;
  arrays.push_back(f32("features", {b.n, b.feature_dim}, b.features));
  arrays.push_back(f32("logits", {b.n, b.num_classes}, b.logits));
  if (b.labels) arrays.push_back(NamedArray{"labels", {b.n}, *b.labels});
  return arrays;
}

LogitBundle logit_bundle_from_arrays(const std::vector<NamedArray>& arrays) {
  const NamedArray* fa = find(arrays, "features");
  const NamedArray* za = find(arrays, "logits");
  LogitBundle b;
  b.features = f32_matrix(fa, "features");
  b.logits = f32_matrix(za, "logits");
  if (fa->dims[0] != za->dims[0]) fail(ErrorCategory::kFormat, "features/logits row mismatch");
  b.n = fa->dims[0];
  b.feature_dim = fa->dims[1];
  b.num_classes = za->dims[1];
  if (const NamedArray* ya = find(arrays, "labels")) b.labels = i64_vector(ya);
  b.validate();
  return b;
}

std::vector<NamedArray> to_arrays(const DataSplit& s) {
  if (s.inputs.size() != s.n * s.dim || s.labels.size() != s.n) {
    fail(ErrorCategory::kDimension, "DataSplit size mismatch");
  }
  return {f32("inputs", {s.n, s.dim}, s.inputs), NamedArray{"labels", {s.n}, s.labels}};
}

DataSplit data_split_from_arrays(const std::vector<NamedArray>& arrays) {
  const NamedArray* xa = find(arrays, "inputs");
  const NamedArray* ya = find(arrays, "labels");
  DataSplit s;
  s.inputs = f32_matrix(xa, "inputs");
  if (!ya) fail(ErrorCategory::kFormat, "missing required array 'labels'");
  s.labels = i64_vector(ya);
  s.n = xa->dims[0];
  s.dim = xa->dims[1];
  if (s.labels.size() != s.n) fail(ErrorCategory::kFormat, "inputs/labels row mismatch");
  return s;
}

void write(const std::filesystem::path& path, const LogitBundle& b) {
  detail::write_file(path, encode(to_arrays(b)));
}

void write(const std::filesystem::path& path, const DataSplit& s) {
  detail::write_file(path, encode(to_arrays(s)));
}

LogitBundle read_logit_bundle(const std::filesystem::path& path) {
  try {
    return logit_bundle_from_arrays(decode(detail::read_file(path)));
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::kIo) throw;
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

DataSplit read_data_split(const std::filesystem::path& path) {
  try {
    return data_split_from_arrays(decode(detail::read_file(path)));
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::kIo) throw;
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCategory::kFormat, "csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

LogitBundle parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCategory::kFormat, "csv: missing header");
  const auto header = split_csv_line(line);
  LogitBundle b;
  bool has_label = false;
  for (std::size_t k = 0; k < header.size(); ++k) {
    const std::string& h = header[k];
    const std::string expect_f = "f" + std::to_string(b.feature_dim);
    const std::string expect_z = "z" + std::to_string(b.num_classes);
    if (b.num_classes == 0 && h == expect_f) {
      ++b.feature_dim;
    } else if (h == expect_z) {
      ++b.num_classes;
    } else if (h == "label" && k + 1 == header.size()) {
      has_label = true;
    } else {
      fail(ErrorCategory::kFormat, "csv: unexpected header column '" + h + "'");
    }
  }
  if (b.num_classes == 0) fail(ErrorCategory::kFormat, "csv: no logit columns");
  if (has_label) b.labels.emplace();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorCategory::kFormat, "csv line " + std::to_string(line_no) + ": wrong column count");
    }
    for (std::size_t k = 0; k < b.feature_dim; ++k) {
      b.features.push_back(static_cast<float>(parse_double(cells[k], line_no)));
    }
    for (std::size_t k = 0; k < b.num_classes; ++k) {
      b.logits.push_back(static_cast<float>(parse_double(cells[b.feature_dim + k], line_no)));
    }
    if (has_label) {
      const double y = parse_double(cells.back(), line_no);
      b.labels->push_back(static_cast<std::int64_t>(y));
    }
    ++b.n;
  }
  b.validate();
  return b;
}

LogitBundle read_csv(const std::filesystem::path& path) {
  const auto data = detail::read_file(path);
  return parse_csv(std::string(data.begin(), data.end()));
}

}  // namespace bundle
}  // namespace etn
