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
#include <map>
#include <random>

#include "auctionlab/equilibrium.hpp"
#include "auctionlab/errors.hpp"
#include "auctionlab/parallel.hpp"

using namespace auctionlab;

namespace {

const ValueDistribution kUniform{0, 100};

const BidFunction& solved(double gamma) {
  static std::map<double, BidFunction> cache;
  auto it = cache.find(gamma);
  if (it == cache.end()) it = cache.emplace(gamma, solve_ncsp_equilibrium(kUniform, 2, gamma)).first;
  return it->second;
}

// Expected utility of bidding beta with value theta against one rival who
// follows b, the seller pricing at min{beta, b(x) + gamma}.
double deviation_utility(const BidFunction& b, double gamma, double theta, double beta) {
  const int steps = 20000;
  const double h = 100.0 / steps;
  double total = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = (i + 0.5) * h;
    const double rival = b(x);
    if (rival >= beta) continue;
    total += (theta - std::min(beta, rival + gamma)) * h / 100.0;
  }
  return total;
}

}  // namespace

TEST_CASE("first-price bid for two uniform bidders is half the value") {
  CHECK(fp_bid(50.0, kUniform, 2) == 25.0);
  CHECK(fp_bid(0.0, kUniform, 2) == 0.0);
  for (int t = 0; t <= 100; ++t) CHECK(std::abs(fp_bid(t, kUniform, 2) - 0.5 * t) <= 1e-12);
  CHECK_THROWS_AS(fp_bid(10.0, kUniform, 1), DomainError);
  CHECK_THROWS_AS(fp_bid(101.0, kUniform, 2), DomainError);
}

TEST_CASE("first-price bid with three bidders against a Monte Carlo oracle") {
  auto rng = stream_rng(99, 0);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  double sum = 0.0;
  long kept = 0;
  for (int i = 0; i < 2'000'000; ++i) {
    const double m = std::max(u(rng), u(rng));
    if (m < 60.0) {
      sum += m;
      ++kept;
    }
  }
  const double mc = sum / static_cast<double>(kept);
  CHECK(std::abs(mc - 40.0) < 0.1);
  CHECK(fp_bid(60.0, kUniform, 3) == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("credible second-price bid is the value") {
  CHECK(csp_bid(73.0) == 73.0);
  CHECK(csp_bid(0.0) == 0.0);
  CHECK(csp_bid(100.0) == 100.0);
}

TEST_CASE("seller best response examples") {
  const std::array<double, 2> a{80.0, 50.0};
  auto d = seller_best_response(a, SellerParams{10.0});
  CHECK(d.winner_index == 0);
  CHECK(d.price == 60.0);
  d = seller_best_response(a, SellerParams{40.0});
  CHECK(d.price == 80.0);
  const std::array<double, 2> tie{35.0, 35.0};
  d = seller_best_response(tie, SellerParams{5.0});
  CHECK(d.winner_index == 0);
  CHECK(d.price == 35.0);
  const std::array<double, 1> one{10.0};
  CHECK_THROWS_AS(seller_best_response(one, SellerParams{5.0}), DomainError);
  CHECK_THROWS_AS(seller_best_response(a, SellerParams{0.0}), DomainError);
  CHECK_THROWS_AS(seller_best_response(a, SellerParams{INFINITY}), DomainError);
}

TEST_CASE("seller best response against brute-force price search") {
  auto rng = stream_rng(5, 1);
  std::uniform_int_distribution<int> bid(0, 100);
  std::uniform_int_distribution<int> gam(1, 60);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::array<double, 3> bids{double(bid(rng)), double(bid(rng)), double(bid(rng))};
    const double g = gam(rng);
    std::array<double, 3> sorted = bids;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    // The seller gains one per unit of price up to second + gamma, so the
    // best integer price below the top bid is the smaller of the two.
    double best_price = sorted[1];
    while (best_price + 1 <= sorted[0] && best_price + 1 <= sorted[1] + g) best_price += 1;
    const auto d = seller_best_response(bids, SellerParams{g});
    CHECK(bids[d.winner_index] == sorted[0]);
    CHECK(d.price == best_price);
    CHECK(d.price >= sorted[1]);
  }
}

TEST_CASE("bid function interpolation and inverse") {
  const BidFunction f = tabulate_fp(kUniform, 2, 101);
  CHECK(f(40.0) == doctest::Approx(20.0));
  CHECK(f.inverse(f(40.0)) == doctest::Approx(40.0).epsilon(1e-9));
  CHECK(f.inverse(-5.0) == 0.0);
  CHECK(f.inverse(60.0) == 100.0);
  CHECK(f.is_increasing());
  CHECK_THROWS_AS(BidFunction({0.0, 0.0}, {0.0, 1.0}, Treatment::kFP), DomainError);
}

TEST_CASE("NCSP equilibrium at gamma 10 is nested and solves the first-order condition") {
  const BidFunction& b = solved(10.0);
  CHECK(b.size() == 1001);
  CHECK(b(0.0) == 0.0);
  CHECK(b.is_increasing());
  CHECK(b.residual() < 1e-8);
  CHECK(ncsp_fixed_point_residual(b, kUniform, 2, 10.0) < 1e-8);
  const auto nest = check_nesting(b, kUniform, 2);
  CHECK(nest.holds);
  CHECK(nest.checked_points == 999);
  for (double t = 1.0; t < 100.0; t += 1.0) {
    CHECK(b(t) >= 0.5 * t - 1e-9);
    CHECK(b(t) < t);
  }
}

TEST_CASE("NCSP bids fall as the seller tolerates more overcharging") {
  const std::array<double, 4> gammas{0.5, 5.0, 50.0, 500.0};
  for (std::size_t i = 0; i + 1 < gammas.size(); ++i) {
    const BidFunction& lo = solved(gammas[i]);
    const BidFunction& hi = solved(gammas[i + 1]);
    for (double t = 0.0; t <= 100.0; t += 0.5) CHECK(lo(t) >= hi(t) - 1e-9);
  }
}

TEST_CASE("NCSP limits: large gamma is first price, tiny gamma is truthful") {
  const BidFunction& wide = solved(200.0);
  for (double t : wide.grid()) CHECK(std::abs(wide(t) - 0.5 * t) <= 1e-6);
  const BidFunction& narrow = solved(1e-6);
  for (double t : narrow.grid()) CHECK(std::abs(narrow(t) - t) <= 1e-3);
}

TEST_CASE("NCSP equilibrium bid is a best response to itself") {
  const double gamma = 10.0;
  const BidFunction& b = solved(gamma);
  for (double theta : {20.0, 45.0, 70.0, 95.0}) {
    const double eq = deviation_utility(b, gamma, theta, b(theta));
    double best = -1.0;
    for (double beta = 0.0; beta <= theta; beta += 0.05)
      best = std::max(best, deviation_utility(b, gamma, theta, beta));
    CHECK(eq >= best - 1e-3);
  }
}

TEST_CASE("solver rejects bad options and reports non-convergence") {
  CHECK_THROWS_AS(solve_ncsp_equilibrium(kUniform, 2, 0.0), DomainError);
  NcspSolverOptions small;
  small.grid_size = 50;
  CHECK_THROWS_AS(solve_ncsp_equilibrium(kUniform, 2, 10.0, small), DomainError);
  NcspSolverOptions short_run;
  short_run.max_sweeps = 2;
  try {
    solve_ncsp_equilibrium(kUniform, 2, 10.0, short_run);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.last_residual() > 1e-8);
    CHECK(e.code() == ErrorCode::kSolver);
  }
}

TEST_CASE("expected revenue of the three equilibrium formats") {
  const double target = 100.0 / 3.0;
  const BidFunction fp = tabulate_fp(kUniform, 2, 1001);
  const BidFunction csp = tabulate_csp(kUniform, 1001);
  CHECK(std::abs(expected_revenue(fp, kUniform, 2, PricingRule::first_price()) - target) < 0.01);
  CHECK(std::abs(expected_revenue(csp, kUniform, 2, PricingRule::second_price()) - target) < 0.01);
  const double ncsp = expected_revenue(solved(10.0), kUniform, 2, PricingRule::overcharge(10.0));
  CHECK(std::abs(ncsp - target) < 0.05);
}

TEST_CASE("expected revenue rejects a non-monotone bid function") {
  const BidFunction flat({0.0, 50.0, 100.0}, {0.0, 0.0, 0.0}, Treatment::kFP);
  CHECK_THROWS_AS(expected_revenue(flat, kUniform, 2, PricingRule::first_price()), DomainError);
}
