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

#include <stdexcept>
#include <string>
#include <string_view>

namespace etn {

// Coarse failure classes. The CLI prints the category name on its single
// error line and maps it to a process exit code.
enum class ErrorCategory {
  kDomain,         // argument outside a function's mathematical domain
  kDimension,      // mismatched vector/matrix sizes
  kInvalidArgument,
  kConfig,         // bad configuration value or unknown key
  kFormat,         // bad magic, malformed payload, trailing bytes
  kVersion,        // unsupported file version
  kTruncated,      // input ended early
  kIo,             // filesystem failures
  kNumerical,      // NaN/inf during optimisation
  kUsage,          // command-line usage
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace etn
