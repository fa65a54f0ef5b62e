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

#include "auctionlab/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "auctionlab/errors.hpp"

namespace auctionlab {

ValueDistribution::ValueDistribution(int lower, int upper) : lower_(lower), upper_(upper) {
  if (!(upper > lower)) throw DomainError("value distribution needs upper > lower");
}

double ValueDistribution::cdf(double theta) const {
  if (!(theta >= lower_ && theta <= upper_)) {
    std::ostringstream os;
    os << "cdf: theta=" << theta << " outside [" << lower_ << ", " << upper_ << "]";
    throw DomainError(os.str());
  }
  return (theta - lower_) / width();
}

double ValueDistribution::pdf(double theta) const {
  if (!(theta >= lower_ && theta <= upper_)) {
    std::ostringstream os;
    os << "pdf: theta=" << theta << " outside [" << lower_ << ", " << upper_ << "]";
    throw DomainError(os.str());
  }
  return 1.0 / width();
}

int ValueDistribution::sample_integer(std::mt19937_64& rng) const {
  std::uniform_int_distribution<int> dist(lower_, upper_);
  return dist(rng);
}

namespace {

std::string lower_case(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr double kPriceTol = 1e-9;

}  // namespace

std::string_view to_string(Treatment t) noexcept {
  switch (t) {
    case Treatment::kFP: return "fp";
    case Treatment::kCSP: return "csp";
    case Treatment::kNCSP: return "ncsp";
  }
  return "?";
}

Treatment parse_treatment(std::string_view s) {
  const auto v = lower_case(s);
  if (v == "fp") return Treatment::kFP;
  if (v == "csp") return Treatment::kCSP;
  if (v == "ncsp") return Treatment::kNCSP;
  throw InputError("unknown treatment '" + std::string(s) + "' (expected fp, csp or ncsp)");
}

std::string_view to_string(Role r) noexcept { return r == Role::kBidder ? "bidder" : "seller"; }

Role parse_role(std::string_view s) {
  const auto v = lower_case(s);
  if (v == "bidder") return Role::kBidder;
  if (v == "seller") return Role::kSeller;
  throw InputError("unknown role '" + std::string(s) + "' (expected bidder or seller)");
}

std::string to_string(const SubjectKey& key) { return key.session_id + "/" + key.subject_id; }

int RoundRecord::winner_index() const noexcept {
  if (winner_id == bidder_ids[0]) return 0;
  if (winner_id == bidder_ids[1]) return 1;
  return -1;
}

std::vector<BidRecord> bids_from_rounds(const std::vector<RoundRecord>& rounds) {
  std::vector<BidRecord> out;
  out.reserve(rounds.size() * 2);
  for (const auto& r : rounds) {
    for (int i = 0; i < 2; ++i) {
      out.push_back({r.session_id, r.bidder_ids[i], Role::kBidder, r.round, r.treatment,
                     r.values[i], r.bids[i]});
    }
  }
  return out;
}

std::map<SubjectKey, std::vector<BidRecord>> group_by_subject(const std::vector<BidRecord>& bids) {
  std::map<SubjectKey, std::vector<BidRecord>> out;
  for (const auto& b : bids) {
    if (b.role != Role::kBidder) continue;
    out[b.key()].push_back(b);
  }
  for (auto& [key, recs] : out) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const BidRecord& a, const BidRecord& b) { return a.round < b.round; });
  }
  return out;
}

namespace {

bool in_range(double x) { return x >= 0.0 && x <= 100.0; }

void check_sequences(const std::map<SubjectKey, std::vector<int>>& rounds_by_subject,
                     std::vector<Violation>& out) {
  for (const auto& [key, rounds] : rounds_by_subject) {
    std::set<int> distinct(rounds.begin(), rounds.end());
    if (distinct.size() != rounds.size()) {
      for (int r : distinct) {
        const auto n = std::count(rounds.begin(), rounds.end(), r);
        if (n > 1) {
          out.push_back({ViolationKind::kDuplicateKey,
                         "duplicate (subject, round) key: " + to_string(key) + " round " +
                             std::to_string(r)});
        }
      }
      continue;
    }
    int expected = 1;
    for (int r : distinct) {
      if (r != expected) {
        out.push_back({ViolationKind::kRoundSequence,
                       "rounds of " + to_string(key) + " are not consecutive from 1 (missing round " +
                           std::to_string(expected) + ")"});
        break;
      }
      ++expected;
    }
  }
}

void validate_round(const RoundRecord& r, std::size_t index, std::vector<Violation>& out) {
  const std::string where = "round record " + std::to_string(index + 1) + " (" + r.session_id +
                            ", round " + std::to_string(r.round) + ")";
  if (r.round < 1) out.push_back({ViolationKind::kRange, where + ": round must be >= 1"});
  for (int i = 0; i < 2; ++i) {
    if (!in_range(r.values[i]))
      out.push_back({ViolationKind::kRange, where + ": value" + std::to_string(i + 1) +
                                                " outside [0, 100]"});
    if (!in_range(r.bids[i]))
      out.push_back({ViolationKind::kRange, where + ": bid" + std::to_string(i + 1) +
                                                " outside [0, 100]"});
  }
  if (!in_range(r.price)) out.push_back({ViolationKind::kRange, where + ": price outside [0, 100]"});

  if (r.bidder_ids[0] == r.bidder_ids[1])
    out.push_back({ViolationKind::kRoundGroup, where + ": both bidders have the same id"});
  if (r.seller_id == r.bidder_ids[0] || r.seller_id == r.bidder_ids[1])
    out.push_back({ViolationKind::kRoundGroup, where + ": seller is also a bidder"});
  const int w = r.winner_index();
  if (w < 0) {
    out.push_back({ViolationKind::kRoundGroup, where + ": winner is not one of the bidders"});
    return;
  }
  const double winning_bid = r.bids[w];
  switch (r.treatment) {
    case Treatment::kNCSP:
      if (r.price > winning_bid + kPriceTol)
        out.push_back({ViolationKind::kRoundGroup, where + ": price exceeds the winner's bid"});
      break;
    case Treatment::kFP:
      if (winning_bid < r.high_bid() || std::abs(r.price - r.high_bid()) > kPriceTol)
        out.push_back(
            {ViolationKind::kRoundGroup, where + ": first-price outcome differs from the rules"});
      break;
    case Treatment::kCSP:
      if (winning_bid < r.high_bid() || std::abs(r.price - r.low_bid()) > kPriceTol)
        out.push_back(
            {ViolationKind::kRoundGroup, where + ": second-price outcome differs from the rules"});
      break;
  }
}

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& d) {
  std::vector<Violation> out;
  // Bid records of round-level data are derived from the rounds, checked below.
  for (std::size_t i = 0; i < d.bids.size() && !d.has_rounds(); ++i) {
    const auto& b = d.bids[i];
    if (b.role != Role::kBidder) continue;
    const std::string where = "bid record " + std::to_string(i + 1) + " (" + to_string(b.key()) +
                              ", round " + std::to_string(b.round) + ")";
    if (b.round < 1) out.push_back({ViolationKind::kRange, where + ": round must be >= 1"});
    if (!in_range(b.value)) out.push_back({ViolationKind::kRange, where + ": value outside [0, 100]"});
    if (!in_range(b.bid)) out.push_back({ViolationKind::kRange, where + ": bid outside [0, 100]"});
  }

  std::map<SubjectKey, std::vector<int>> participation;
  if (d.has_rounds()) {
    for (std::size_t i = 0; i < d.rounds.size(); ++i) {
      const auto& r = d.rounds[i];
      validate_round(r, i, out);
      participation[{r.session_id, r.bidder_ids[0]}].push_back(r.round);
      if (r.bidder_ids[1] != r.bidder_ids[0])
        participation[{r.session_id, r.bidder_ids[1]}].push_back(r.round);
      participation[{r.session_id, r.seller_id}].push_back(r.round);
    }
  } else {
    for (const auto& b : d.bids) participation[b.key()].push_back(b.round);
  }
  check_sequences(participation, out);
  return out;
}

RegularFilterResult regular_filter(const Dataset& d) {
  RegularFilterResult res;
  res.data.meta = d.meta;
  res.data.rounds = d.rounds;
  res.data.bids.reserve(d.bids.size());
  for (const auto& b : d.bids) {
    if (b.role == Role::kBidder && b.bid > b.value) {
      ++res.dropped;
      ++res.dropped_by_subject[b.key()];
      continue;
    }
    if (b.role == Role::kBidder && b.bid == b.value) ++res.zero_surplus_by_subject[b.key()];
    res.data.bids.push_back(b);
  }
  return res;
}

}  // namespace auctionlab
