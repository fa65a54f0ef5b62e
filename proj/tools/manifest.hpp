// Copyright 2026 The AuctionLab Authors
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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace auctionlab_cli {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Run record written as `key=value` lines in a fixed key order. Outputs are
/// repeated `output=` lines. Nothing time- or host-dependent is recorded.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma_hat;
  std::string version;
  std::vector<std::string> outputs;
  /// Keys this tool does not know, preserved verbatim on rewrite.
  std::map<std::string, std::string> extra;

  std::string serialize() const;
  static RunManifest parse(std::string_view text);
  /// Empty manifest when the file does not exist.
  static RunManifest load_or_empty(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace auctionlab_cli
