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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace auctionlab {

/// The commonly known value law. Values are drawn on the integer grid
/// {lower, ..., upper}; equilibrium math uses the continuous uniform cdf on
/// [lower, upper].
class ValueDistribution {
 public:
  ValueDistribution() = default;
  ValueDistribution(int lower, int upper);

  int lower() const noexcept { return lower_; }
  int upper() const noexcept { return upper_; }
  double width() const noexcept { return static_cast<double>(upper_ - lower_); }

  /// Throws DomainError outside [lower, upper].
  double cdf(double theta) const;
  double pdf(double theta) const;

  /// Each integer in [lower, upper] with probability 1/(upper-lower+1).
  int sample_integer(std::mt19937_64& rng) const;

 private:
  int lower_ = 0;
  int upper_ = 100;
};

enum class Treatment { kFP, kCSP, kNCSP };

std::string_view to_string(Treatment t) noexcept;
/// Accepts fp/csp/ncsp in any case; throws InputError otherwise.
Treatment parse_treatment(std::string_view s);

enum class Role { kBidder, kSeller };

std::string_view to_string(Role r) noexcept;
Role parse_role(std::string_view s);

struct SubjectKey {
  std::string session_id;
  std::string subject_id;
  auto operator<=>(const SubjectKey&) const = default;
};

std::string to_string(const SubjectKey& key);

struct BidRecord {
  std::string session_id;
  std::string subject_id;
  Role role = Role::kBidder;
  int round = 1;
  Treatment treatment = Treatment::kFP;
  int value = 0;
  double bid = 0.0;

  SubjectKey key() const { return {session_id, subject_id}; }
};

struct RoundRecord {
  std::string session_id;
  int round = 1;
  Treatment treatment = Treatment::kFP;
  std::string bidder_ids[2];
  int values[2] = {0, 0};
  double bids[2] = {0.0, 0.0};
  std::string seller_id;
  std::string winner_id;
  double price = 0.0;

  /// 0 or 1; -1 when winner_id names neither bidder.
  int winner_index() const noexcept;
  double high_bid() const noexcept { return bids[0] >= bids[1] ? bids[0] : bids[1]; }
  double low_bid() const noexcept { return bids[0] >= bids[1] ? bids[1] : bids[0]; }
};

struct DatasetMeta {
  std::string source;
  std::optional<std::uint64_t> seed;
};

/// Per-round outcomes and per-subject bid panels. Simulated and round-level
/// data carry both; a bids-only file leaves `rounds` empty.
struct Dataset {
  DatasetMeta meta;
  std::vector<RoundRecord> rounds;
  std::vector<BidRecord> bids;

  bool has_rounds() const noexcept { return !rounds.empty(); }
};

/// Two bidder records per round, in round order.
std::vector<BidRecord> bids_from_rounds(const std::vector<RoundRecord>& rounds);

/// Bidder records grouped by subject, each group sorted by round.
std::map<SubjectKey, std::vector<BidRecord>> group_by_subject(const std::vector<BidRecord>& bids);

enum class ViolationKind { kRange, kRoundGroup, kDuplicateKey, kRoundSequence };

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Report-style validation; an empty result means the dataset is valid.
std::vector<Violation> validate_dataset(const Dataset& d);

struct RegularFilterResult {
  Dataset data;
  std::size_t dropped = 0;
  std::map<SubjectKey, std::size_t> dropped_by_subject;
  /// Surviving records with bid == value (log-utility undefined downstream).
  std::map<SubjectKey, std::size_t> zero_surplus_by_subject;
};

/// Keeps bidder records with bid <= value. Round records are passed through.
RegularFilterResult regular_filter(const Dataset& d);

}  // namespace auctionlab
