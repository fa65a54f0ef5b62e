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

#include "auctionlab/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "auctionlab/errors.hpp"

namespace auctionlab {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double x, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("line " + std::to_string(line_) + ": " + msg);
  }
  int to_int(std::string_view s, const char* field) const {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      fail(std::string(field) + " is not an integer: '" + std::string(s) + "'");
    return v;
  }
  double to_double(std::string_view s, const char* field) const {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
      fail(std::string(field) + " is not a number: '" + std::string(s) + "'");
    return v;
  }
  std::string id(std::string_view s, const char* field) const {
    if (s.empty()) fail(std::string(field) + " is empty");
    return std::string(s);
  }
  template <typename F>
  auto wrap(F&& f) const {
    try {
      return f();
    } catch (const InputError& e) {
      fail(e.what());
    }
  }

 private:
  std::size_t line_;
};

}  // namespace

Dataset parse_dataset(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next()) throw InputError(source + ": empty file");
  if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const bool rounds = line == kRoundsHeader;
  if (!rounds && line != kBidsHeader)
    throw InputError("line 1: header is neither the bids schema '" + std::string(kBidsHeader) +
                     "' nor the rounds schema '" + std::string(kRoundsHeader) + "'");
  Dataset d;
  d.meta.source = source;
  const std::size_t width = rounds ? 12 : 7;
  while (next()) {
    if (line.empty()) continue;
    const LineError at(lineno);
    const auto f = split(line);
    if (f.size() != width)
      at.fail("expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()));
    if (rounds) {
      RoundRecord r;
      r.session_id = at.id(f[0], "session_id");
      r.round = at.to_int(f[1], "round");
      r.treatment = at.wrap([&] { return parse_treatment(f[2]); });
      r.bidder_ids[0] = at.id(f[3], "bidder1_id");
      r.values[0] = at.to_int(f[4], "value1");
      r.bids[0] = at.to_double(f[5], "bid1");
      r.bidder_ids[1] = at.id(f[6], "bidder2_id");
      r.values[1] = at.to_int(f[7], "value2");
      r.bids[1] = at.to_double(f[8], "bid2");
      r.seller_id = std::string(f[9]);
      r.winner_id = at.id(f[10], "winner_id");
      r.price = at.to_double(f[11], "price");
      if (r.winner_index() < 0) at.fail("winner_id names neither bidder");
      d.rounds.push_back(std::move(r));
    } else {
      BidRecord b;
      b.session_id = at.id(f[0], "session_id");
      b.subject_id = at.id(f[1], "subject_id");
      b.role = at.wrap([&] { return parse_role(f[2]); });
      b.round = at.to_int(f[3], "round");
      b.treatment = at.wrap([&] { return parse_treatment(f[4]); });
      b.value = at.to_int(f[5], "value");
      b.bid = at.to_double(f[6], "bid");
      d.bids.push_back(std::move(b));
    }
  }
  if (rounds) d.bids = bids_from_rounds(d.rounds);
  return d;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return parse_dataset(in, path);
}

std::string rounds_csv(const Dataset& d) {
  std::string out(kRoundsHeader);
  out += '\n';
  for (const auto& r : d.rounds) {
    out += r.session_id + ',' + std::to_string(r.round) + ',' + std::string(to_string(r.treatment)) + ',';
    for (int i = 0; i < 2; ++i) {
      out += r.bidder_ids[i] + ',' + std::to_string(r.values[i]) + ',' + format_number(r.bids[i]) + ',';
    }
    out += r.seller_id + ',' + r.winner_id + ',' + format_number(r.price) + '\n';
  }
  return out;
}

std::string bids_csv(const Dataset& d) {
  std::string out(kBidsHeader);
  out += '\n';
  for (const auto& b : d.bids) {
    out += b.session_id + ',' + b.subject_id + ',' + std::string(to_string(b.role)) + ',' +
           std::to_string(b.round) + ',' + std::string(to_string(b.treatment)) + ',' +
           std::to_string(b.value) + ',' + format_number(b.bid) + '\n';
  }
  return out;
}

std::string bid_function_csv(const BidFunction& f) {
  std::string out = "theta,bid\n";
  char buf[80];
  for (std::size_t i = 0; i < f.grid().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", f.grid()[i], f.bids()[i]);
    out += buf;
  }
  return out;
}

std::string regression_csv(const RegressionResult& r) {
  std::string out = "term,coefficient,std_error,n_obs,n_clusters\n";
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    out += r.names[j] + ',' + format_number(r.coefficients[j]) + ',' + format_number(r.std_errors[j]) + ',' +
           std::to_string(r.n_obs) + ',' + std::to_string(r.n_clusters) + '\n';
  }
  return out;
}

std::string seller_table_csv(const SellerTypeTable& t) {
  std::string out = "session_id,seller_id,rounds,defined_rounds,overcharging_rounds,coefficient,type\n";
  for (const auto& r : t.rows) {
    out += r.session_id + ',' + r.seller_id + ',' + std::to_string(r.rounds) + ',' +
           std::to_string(r.defined_rounds) + ',' + std::to_string(r.overcharging_rounds) + ',' +
           format_number(r.coefficient) + ',' + std::string(to_string(r.type)) + '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot move output into place at " + path);
  }
}

}  // namespace auctionlab
