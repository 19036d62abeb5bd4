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

#include "etn/error.hpp"

namespace etn {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kDomain: return "domain";
    case ErrorCategory::kDimension: return "dimension";
    case ErrorCategory::kInvalidArgument: return "invalid-argument";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kVersion: return "version";
    case ErrorCategory::kTruncated: return "truncated";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kUsage: return "usage";
  }
  return "unknown";
}

}  // namespace etn
