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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "auctionlab/errors.hpp"
#include "auctionlab/parallel.hpp"
#include "auctionlab/simulate.hpp"

using namespace auctionlab;

namespace {

bool same_rounds(const Dataset& a, const Dataset& b) {
  if (a.rounds.size() != b.rounds.size()) return false;
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    const auto& x = a.rounds[i];
    const auto& y = b.rounds[i];
    if (x.values[0] != y.values[0] || x.values[1] != y.values[1] || x.bids[0] != y.bids[0] ||
        x.bids[1] != y.bids[1] || x.price != y.price || x.winner_id != y.winner_id ||
        x.seller_id != y.seller_id || x.bidder_ids[0] != y.bidder_ids[0])
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("auction rules on a bid pair") {
  auto rng = stream_rng(1, 0);
  const auto rule = SellerStrategy::rule_following();
  auto o = settle({47.0, 25.0}, Treatment::kCSP, rule, rng);
  CHECK(o.winner_index == 0);
  CHECK(o.price == 25.0);
  o = settle({25.0, 47.0}, Treatment::kFP, rule, rng);
  CHECK(o.winner_index == 1);
  CHECK(o.price == 47.0);
  o = settle({80.0, 50.0}, Treatment::kNCSP, SellerStrategy::gamma_overcharger(10.0, 0.0), rng);
  CHECK(o.price == 60.0);
  o = settle({80.0, 50.0}, Treatment::kNCSP, SellerStrategy::always_max(), rng);
  CHECK(o.price == 80.0);
  o = settle({80.0, 40.0}, Treatment::kNCSP, SellerStrategy::ratio_type(0.25), rng);
  CHECK(o.price == 50.0);
  o = settle({30.0, 30.0}, Treatment::kFP, rule, rng);
  CHECK(o.winner_index == 0);
}

TEST_CASE("overcharger without noise charges the censored gamma") {
  auto rng = stream_rng(2, 0);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  const auto seller = SellerStrategy::gamma_overcharger(10.0, 0.0);
  for (int i = 0; i < 1000; ++i) {
    const std::array<double, 2> bids{u(rng), u(rng)};
    const auto o = settle(bids, Treatment::kNCSP, seller, rng);
    const double lo = std::min(bids[0], bids[1]);
    const double hi = std::max(bids[0], bids[1]);
    CHECK(o.price - lo == doctest::Approx(std::min(10.0, hi - lo)));
    CHECK(o.price <= hi);
  }
}

TEST_CASE("strategy construction limits") {
  CHECK_THROWS_AS(BidderStrategy::linear(1.6), DomainError);
  CHECK_THROWS_AS(BidderStrategy::linear(-0.1), DomainError);
  CHECK_THROWS_AS(SellerStrategy::ratio_type(1.5), DomainError);
  CHECK_THROWS_AS(SellerStrategy::gamma_overcharger(0.0, 1.0), DomainError);
  auto rng = stream_rng(3, 0);
  const auto random = BidderStrategy::random_uniform();
  for (int v = 0; v <= 100; ++v) {
    const double b = random.bid(v, rng);
    CHECK(b >= 0.0);
    CHECK(b <= v);
  }
  CHECK(BidderStrategy::linear(1.5).bid(90, rng) == 100.0);
}

TEST_CASE("single truthful round goes to the higher value") {
  SimConfig cfg;
  cfg.n_rounds = 1;
  const Dataset d = run_session(cfg);
  REQUIRE(d.rounds.size() == 1);
  const auto& r = d.rounds[0];
  CHECK(r.values[r.winner_index()] == std::max(r.values[0], r.values[1]));
  CHECK(d.bids.size() == 2);
}

TEST_CASE("sessions are reproducible and seed dependent") {
  SimConfig cfg;
  cfg.treatment = Treatment::kNCSP;
  cfg.n_rounds = 500;
  cfg.groups = 3;
  cfg.rematch = true;
  cfg.seller = SellerStrategy::gamma_overcharger(10.0, 2.0);
  cfg.seed = 42;
  const Dataset a = run_session(cfg);
  const Dataset b = run_session(cfg);
  CHECK(same_rounds(a, b));
  cfg.seed = 43;
  CHECK_FALSE(same_rounds(a, run_session(cfg)));
}

TEST_CASE("sessions do not depend on the worker count") {
  SimConfig cfg;
  cfg.treatment = Treatment::kNCSP;
  cfg.n_rounds = 300;
  cfg.groups = 4;
  cfg.rematch = true;
  cfg.seller = SellerStrategy::random_winner();
  setenv("AUCTIONLAB_THREADS", "1", 1);
  const Dataset one = run_session(cfg);
  setenv("AUCTIONLAB_THREADS", "4", 1);
  const Dataset four = run_session(cfg);
  unsetenv("AUCTIONLAB_THREADS");
  CHECK(same_rounds(one, four));
}

TEST_CASE("rule-following NCSP reproduces CSP prices") {
  SimConfig cfg;
  cfg.n_rounds = 400;
  cfg.seed = 9;
  cfg.bidders = {BidderStrategy::linear(0.8), BidderStrategy::linear(0.8)};
  cfg.treatment = Treatment::kCSP;
  const Dataset csp = run_session(cfg);
  cfg.treatment = Treatment::kNCSP;
  const Dataset ncsp = run_session(cfg);
  for (std::size_t i = 0; i < csp.rounds.size(); ++i) CHECK(csp.rounds[i].price == ncsp.rounds[i].price);
}

TEST_CASE("efficiency") {
  SimConfig cfg;
  cfg.n_rounds = 20000;
  cfg.bidders = {BidderStrategy::linear(0.5), BidderStrategy::linear(0.5)};
  cfg.treatment = Treatment::kFP;
  CHECK(efficiency(run_session(cfg)) == 1.0);
  cfg.treatment = Treatment::kNCSP;
  cfg.seller = SellerStrategy::random_winner();
  cfg.bidders = {BidderStrategy::truthful(), BidderStrategy::truthful()};
  const double e = efficiency(run_session(cfg));
  // Value ties count as efficient: 0.5 + 0.5 / 101 in expectation.
  CHECK(std::abs(e - (0.5 + 0.5 / 101.0)) < 0.015);

  Dataset one;
  RoundRecord r;
  r.bidder_ids[0] = "B1";
  r.bidder_ids[1] = "B2";
  r.values[0] = 10;
  r.values[1] = 90;
  r.winner_id = "B1";
  one.rounds.push_back(r);
  CHECK(efficiency(one) == 0.0);
  CHECK_THROWS_AS(efficiency(Dataset{}), UndefinedStatisticError);
}

TEST_CASE("overcharging ratio") {
  RoundRecord r;
  r.bids[0] = 35.0;
  r.bids[1] = 31.0;
  r.price = 30.0;
  CHECK(*overcharging_ratio(r) == -0.25);
  r.price = 35.0;
  CHECK(*overcharging_ratio(r) == 1.0);
  r.price = 31.0;
  CHECK(*overcharging_ratio(r) == 0.0);
  r.bids[1] = 35.0;
  CHECK_FALSE(overcharging_ratio(r).has_value());
}

TEST_CASE("revenue statistics") {
  Dataset d;
  for (int i = 0; i < 5; ++i) {
    RoundRecord r;
    r.price = 10.0;
    r.session_id = "S1";
    d.rounds.push_back(r);
  }
  auto s = revenue_stats(d);
  CHECK(s.mean == 10.0);
  CHECK(s.std_error == 0.0);
  CHECK_THROWS_AS(revenue_stats(Dataset{}), UndefinedStatisticError);

  SimConfig cfg;
  cfg.treatment = Treatment::kFP;
  cfg.n_rounds = 200000;
  cfg.bidders = {BidderStrategy::linear(0.73), BidderStrategy::linear(0.73)};
  s = revenue_stats(run_session(cfg));
  // E[max of two integer values on 0..100] = 100 - sum k^2 / 101^2.
  const double discrete_max = 0.73 * (100.0 - 338350.0 / 10201.0);
  CHECK(std::abs(s.mean - 0.73 * 200.0 / 3.0) < 0.6);
  CHECK(std::abs(s.mean - discrete_max) < 0.2);
}

TEST_CASE("ratio-type sellers overcharge by their ratio") {
  SimConfig cfg;
  cfg.treatment = Treatment::kNCSP;
  cfg.n_rounds = 5000;
  cfg.seller = SellerStrategy::ratio_type(0.4);
  const auto s = overcharge_stats(run_session(cfg));
  CHECK(s.ncsp_rounds == 5000);
  CHECK(s.mean_ratio == doctest::Approx(0.4));
}

TEST_CASE("configuration parsing") {
  const SimConfig cfg = parse_sim_config(
      "# preset\n"
      "treatment = ncsp\n"
      "rounds = 240\n"
      "groups = 2\n"
      "rematch = true\n"
      "seed = 77\n"
      "bidder1 = linear:0.73\n"
      "bidder2 = random_uniform\n"
      "seller = gamma_overcharger:10:2   # noisy\n"
      "integer_bids = yes\n");
  CHECK(cfg.treatment == Treatment::kNCSP);
  CHECK(cfg.n_rounds == 240);
  CHECK(cfg.groups == 2);
  CHECK(cfg.rematch);
  CHECK(cfg.seed == 77);
  CHECK(cfg.bidders[0].kind() == BidderStrategy::Kind::kLinear);
  CHECK(cfg.bidders[0].coefficient() == 0.73);
  CHECK(cfg.bidders[1].kind() == BidderStrategy::Kind::kRandomUniform);
  CHECK(cfg.seller.kind() == SellerStrategy::Kind::kGammaOvercharger);
  CHECK(cfg.seller.sigma() == 2.0);
  CHECK(cfg.integer_bids);

  const SimConfig eq = parse_sim_config("treatment = fp\nbidder1 = equilibrium\nbidder2 = equilibrium\n");
  REQUIRE(eq.bidders[0].bid_function() != nullptr);
  auto rng = stream_rng(1, 0);
  CHECK(eq.bidders[0].bid(60, rng) == doctest::Approx(30.0));
}

TEST_CASE("configuration errors carry line numbers") {
  auto message = [](const char* text) {
    try {
      parse_sim_config(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("treatment = fp\ncolour = red\n").rfind("line 2:", 0) == 0);
  CHECK(message("rounds = 5\nrounds = 6\n").rfind("line 2:", 0) == 0);
  CHECK(message("\n\nrounds = ten\n").rfind("line 3:", 0) == 0);
  CHECK(message("seller = shady\n").rfind("line 1:", 0) == 0);
  CHECK(message("treatment = dutch\n").rfind("line 1:", 0) == 0);
  CHECK(message("rounds 5\n").rfind("line 1:", 0) == 0);
  CHECK(message("bidder1 = linear:2\n").rfind("line 1:", 0) == 0);
  CHECK(message("rounds = 0\n").rfind("line 1:", 0) == 0);
}
