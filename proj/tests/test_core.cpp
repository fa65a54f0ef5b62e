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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "auctionlab/core.hpp"
#include "auctionlab/errors.hpp"
#include "auctionlab/parallel.hpp"

using namespace auctionlab;

namespace {

BidRecord bidder(std::string subject, int round, int value, double bid) {
  BidRecord r;
  r.session_id = "S1";
  r.subject_id = std::move(subject);
  r.round = round;
  r.treatment = Treatment::kFP;
  r.value = value;
  r.bid = bid;
  return r;
}

Dataset small_session() {
  Dataset d;
  for (int round = 1; round <= 3; ++round) {
    d.bids.push_back(bidder("B1", round, 10 * round, 5.0 * round));
    d.bids.push_back(bidder("B2", round, 20 * round, 10.0 * round));
  }
  return d;
}

}  // namespace

TEST_CASE("uniform cdf at the boundaries and midpoint") {
  const ValueDistribution F;
  CHECK(F.cdf(0.0) == 0.0);
  CHECK(F.cdf(100.0) == 1.0);
  CHECK(F.cdf(50.0) == 0.5);
  CHECK(F.pdf(30.0) == doctest::Approx(0.01));
}

TEST_CASE("cdf rejects values outside the support") {
  const ValueDistribution F;
  CHECK_THROWS_AS(F.cdf(-0.5), DomainError);
  CHECK_THROWS_AS(F.cdf(100.5), DomainError);
  CHECK_THROWS_AS(ValueDistribution(5, 5), DomainError);
}

TEST_CASE("cdf is strictly increasing on the interior") {
  const ValueDistribution F;
  double prev = F.cdf(0.0);
  for (double t = 0.25; t <= 100.0; t += 0.25) {
    const double c = F.cdf(t);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("integer value draws are uniform over the 101 support points") {
  const ValueDistribution F;
  auto rng = stream_rng(2024, 0);
  const int draws = 1'000'000;
  std::vector<int> counts(101, 0);
  for (int i = 0; i < draws; ++i) {
    const int v = F.sample_integer(rng);
    REQUIRE(v >= 0);
    REQUIRE(v <= 100);
    ++counts[v];
  }
  const double p = 1.0 / 101.0;
  const double sd = std::sqrt(draws * p * (1.0 - p));
  for (int v = 0; v <= 100; ++v) CHECK(std::abs(counts[v] - draws * p) < 5.0 * sd);
}

TEST_CASE("treatment and role names") {
  CHECK(parse_treatment("fp") == Treatment::kFP);
  CHECK(parse_treatment("CSP") == Treatment::kCSP);
  CHECK(parse_treatment("Ncsp") == Treatment::kNCSP);
  CHECK_THROWS_AS(parse_treatment("dutch"), InputError);
  CHECK(to_string(Treatment::kNCSP) == "ncsp");
  CHECK(parse_role("seller") == Role::kSeller);
  CHECK_THROWS_AS(parse_role("auctioneer"), InputError);
}

TEST_CASE("winner index follows the winner id") {
  RoundRecord r;
  r.bidder_ids[0] = "B1";
  r.bidder_ids[1] = "B2";
  r.winner_id = "B2";
  CHECK(r.winner_index() == 1);
  r.winner_id = "B7";
  CHECK(r.winner_index() == -1);
}

TEST_CASE("regular filter drops dominated bids") {
  Dataset d;
  d.bids.push_back(bidder("B1", 1, 50, 40.0));
  d.bids.push_back(bidder("B1", 2, 30, 35.0));
  const auto res = regular_filter(d);
  REQUIRE(res.data.bids.size() == 1);
  CHECK(res.data.bids[0].value == 50);
  CHECK(res.dropped == 1);
  CHECK(res.dropped_by_subject.at({"S1", "B1"}) == 1);
}

TEST_CASE("regular filter keeps undominated data unchanged") {
  const Dataset d = small_session();
  const auto res = regular_filter(d);
  CHECK(res.dropped == 0);
  REQUIRE(res.data.bids.size() == d.bids.size());
  for (std::size_t i = 0; i < d.bids.size(); ++i) CHECK(res.data.bids[i].bid == d.bids[i].bid);
}

TEST_CASE("regular filter flags zero-surplus records and keeps them") {
  Dataset d;
  d.bids.push_back(bidder("B1", 1, 40, 40.0));
  d.bids.push_back(bidder("B1", 2, 40, 20.0));
  const auto res = regular_filter(d);
  CHECK(res.data.bids.size() == 2);
  CHECK(res.zero_surplus_by_subject.at({"S1", "B1"}) == 1);
}

TEST_CASE("regular filter is idempotent") {
  auto rng = stream_rng(7, 3);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  Dataset d;
  for (int round = 1; round <= 40; ++round) d.bids.push_back(bidder("B1", round, round * 2, u(rng)));
  const auto once = regular_filter(d);
  const auto twice = regular_filter(once.data);
  CHECK(twice.dropped == 0);
  REQUIRE(twice.data.bids.size() == once.data.bids.size());
  for (std::size_t i = 0; i < once.data.bids.size(); ++i) {
    CHECK(twice.data.bids[i].round == once.data.bids[i].round);
    CHECK(twice.data.bids[i].bid == once.data.bids[i].bid);
  }
}

TEST_CASE("validation of a well-formed session reports nothing") {
  CHECK(validate_dataset(small_session()).empty());
}

TEST_CASE("validation reports an out-of-range bid once") {
  Dataset d = small_session();
  d.bids[2].bid = 120.0;
  const auto v = validate_dataset(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::kRange);
}

TEST_CASE("validation reports a duplicated subject round once") {
  Dataset d = small_session();
  d.bids.push_back(d.bids[0]);
  const auto v = validate_dataset(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::kDuplicateKey);
}

TEST_CASE("bids derived from rounds keep round order") {
  RoundRecord r;
  r.session_id = "S1";
  r.round = 1;
  r.treatment = Treatment::kCSP;
  r.bidder_ids[0] = "B1";
  r.bidder_ids[1] = "B2";
  r.values[0] = 70;
  r.values[1] = 20;
  r.bids[0] = 70;
  r.bids[1] = 20;
  r.seller_id = "S1";
  r.winner_id = "B1";
  r.price = 20;
  const auto bids = bids_from_rounds({r});
  REQUIRE(bids.size() == 2);
  CHECK(bids[0].subject_id == "B1");
  CHECK(bids[1].value == 20);
  CHECK(bids[1].treatment == Treatment::kCSP);
  const auto groups = group_by_subject(bids);
  CHECK(groups.size() == 2);
}
