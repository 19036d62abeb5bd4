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

#include <filesystem>
#include <string>

#include "etn/etn.hpp"

namespace etn {

/// Plain-text "key = value" run configuration. '#' starts a comment; blank
/// lines are ignored. Keys: family, prior_mode, prior_var, mc_samples, lambda,
/// nu, lr, epochs, batch, hidden_dim, seed, odir_weight.
struct RunConfig {
  Family family = Family::kScalar;
  TrainConfig train;
  int hidden_dim = 256;

  /// Throws kConfig on unknown keys, malformed values or invalid settings.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  std::string to_text() const;
  void validate() const;
};

}  // namespace etn
