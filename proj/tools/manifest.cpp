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

#include "manifest.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace auctionlab_cli {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string RunManifest::serialize() const {
  std::string out;
  out += "command=" + command + "\n";
  out += "config_hash=" + config_hash + "\n";
  if (seed) out += "seed=" + std::to_string(*seed) + "\n";
  if (gamma_hat) out += "gamma_hat=" + number(*gamma_hat) + "\n";
  out += "version=" + version + "\n";
  for (const auto& o : outputs) out += "output=" + o + "\n";
  for (const auto& [k, v] : extra) out += k + "=" + v + "\n";
  return out;
}

RunManifest RunManifest::parse(std::string_view text) {
  RunManifest m;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("manifest line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "command") {
      m.command = value;
    } else if (key == "config_hash") {
      m.config_hash = value;
    } else if (key == "seed") {
      std::uint64_t s = 0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), s);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw std::invalid_argument("manifest line " + std::to_string(lineno) + ": bad seed");
      m.seed = s;
    } else if (key == "gamma_hat") {
      double g = 0.0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), g);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw std::invalid_argument("manifest line " + std::to_string(lineno) + ": bad gamma_hat");
      m.gamma_hat = g;
    } else if (key == "version") {
      m.version = value;
    } else if (key == "output") {
      m.outputs.push_back(value);
    } else {
      m.extra[key] = value;
    }
  }
  return m;
}

RunManifest RunManifest::load_or_empty(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void RunManifest::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << serialize();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace auctionlab_cli
