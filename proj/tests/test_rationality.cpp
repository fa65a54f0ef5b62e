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
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "auctionlab/equilibrium.hpp"
#include "auctionlab/errors.hpp"
#include "auctionlab/kde.hpp"
#include "auctionlab/parallel.hpp"
#include "auctionlab/rationality.hpp"

using namespace auctionlab;

namespace {

const ValueDistribution kUniform{0, 100};
const WinBelief kBelief = WinBelief::equilibrium(kUniform, 2);

ConstraintBuilder fp_builder() {
  return [](const std::vector<Observation>& obs) { return build_fp_constraints(obs, kBelief); };
}

ConstraintBuilder ncsp_builder(double gamma) {
  return [gamma](const std::vector<Observation>& obs) {
    return build_ncsp_constraints(obs, kBelief, gamma);
  };
}

std::vector<Observation> linear_bids(const std::vector<int>& values, double c) {
  std::vector<Observation> obs;
  int round = 1;
  for (int v : values) obs.push_back({round++, double(v), c * v});
  return obs;
}

// Difference-constraint oracle for the first-price system with two uniform
// bidders: supergradient 1/theta, levels bounded by a zero source node.
bool fp_oracle(const std::vector<Observation>& obs, double eps = kDefaultStrictEps) {
  const std::size_t m = obs.size();
  struct Edge {
    std::size_t from, to;
    double w;
  };
  std::vector<Edge> edges;
  const std::size_t source = m;
  for (std::size_t j = 0; j < m; ++j) edges.push_back({source, j, 0.0});
  for (std::size_t j = 0; j < m; ++j) {
    const double sj = obs[j].theta - obs[j].bid;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      const double sk = obs[k].theta - obs[k].bid;
      edges.push_back({j, k, (sk - sj) / obs[j].theta});
      if (sk < sj) edges.push_back({j, k, -eps});
      if (sk == sj) edges.push_back({j, k, 0.0});
    }
  }
  std::vector<double> dist(m + 1, 0.0);
  for (std::size_t it = 0; it <= m + 1; ++it) {
    for (const auto& e : edges) dist[e.to] = std::min(dist[e.to], dist[e.from] + e.w);
  }
  for (const auto& e : edges) {
    if (dist[e.from] + e.w < dist[e.to] - 1e-12) return false;
  }
  return true;
}

SubjectData random_fp_subject(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> value(1, 100);
  std::vector<Observation> obs;
  for (std::size_t r = 0; r < n; ++r) {
    const int v = value(rng);
    std::uniform_int_distribution<int> bid(0, v - 1);
    obs.push_back({int(r + 1), double(v), double(bid(rng))});
  }
  return SubjectData("R", std::move(obs));
}

std::vector<Observation> subset(const SubjectData& s, std::uint32_t mask) {
  std::vector<Observation> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (mask >> i & 1U) out.push_back(s[i]);
  }
  return out;
}

std::size_t brute_force_max(const SubjectData& s, const ConstraintBuilder& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1U << s.size()); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size <= best) continue;
    if (consistent(b, subset(s, mask))) best = size;
  }
  return best;
}

LPSystem infeasible_system() {
  LPSystem lp;
  const auto x = lp.add_variable("x", VarBound::kNonPositive);
  lp.add_constraint({{{x, 1.0}}, Relation::kGreaterEqual, 1.0, false, "conflict"});
  return lp;
}

}  // namespace

TEST_CASE("observation status classification") {
  const SubjectData s("S", {{1, 0.0, 0.0}, {2, 40.0, 40.0}, {3, 30.0, 35.0}, {4, 50.0, 20.0}});
  CHECK(s.status(0) == ObservationStatus::kVacuous);
  CHECK(s.status(1) == ObservationStatus::kZeroSurplus);
  CHECK(s.status(2) == ObservationStatus::kDominated);
  CHECK(s.status(3) == ObservationStatus::kUsable);
  CHECK(s.usable() == std::vector<std::size_t>{3});
  CHECK(s.forced_drops() == 2);
  CHECK_THROWS_AS(SubjectData("big", std::vector<Observation>(65, {1, 10.0, 1.0})), SizeError);
}

TEST_CASE("first-price system sizes") {
  const auto obs = linear_bids({10, 20, 30, 40, 50, 60, 70, 80, 90, 100}, 0.5);
  const LPSystem lp = build_fp_constraints(obs, kBelief);
  CHECK(lp.num_variables() == 10);
  CHECK(lp.count_labelled("concavity") == 90);
  CHECK(lp.count_labelled("order") == 45);
  CHECK_NOTHROW(lp.validate());

  const LPSystem one = build_fp_constraints(linear_bids({40}, 0.5), kBelief);
  CHECK(one.num_variables() == 1);
  CHECK(one.num_constraints() == 0);
  CHECK(check_feasible(one));
}

TEST_CASE("first-price system rejects a zero value") {
  CHECK_THROWS_AS(build_fp_constraints({{1, 0.0, 0.0}}, kBelief), DegenerateObservationError);
}

TEST_CASE("half-value bids satisfy the first-price system with the square-root witness") {
  auto rng = stream_rng(3, 0);
  std::uniform_int_distribution<int> value(1, 100);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> values;
    for (int r = 0; r < 10; ++r) values.push_back(value(rng));
    const auto obs = linear_bids(values, 0.5);
    const LPSystem lp = build_fp_constraints(obs, kBelief);
    std::vector<double> witness;
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& o : obs) {
      witness.push_back(0.5 * std::log(o.theta - o.bid));
      top = std::max(top, witness.back());
    }
    for (double& w : witness) w -= top;
    CHECK(max_violation(lp, witness) <= 1e-12);
    CHECK(check_feasible(lp));
  }
}

TEST_CASE("linear bidding is first-price consistent for every slope below one") {
  for (double c : {0.1, 0.3, 0.5, 0.73, 0.9, 0.99}) {
    const auto obs = linear_bids({5, 17, 33, 48, 61, 72, 80, 91, 99, 100}, c);
    CHECK(consistent(fp_builder(), obs));
  }
}

TEST_CASE("first-price feasibility agrees with a shortest-path oracle") {
  auto rng = stream_rng(17, 0);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const SubjectData s = random_fp_subject(rng, 2 + trial % 7);
    const bool lp = consistent(fp_builder(), s.observations());
    CHECK(lp == fp_oracle(s.observations()));
    feasible += lp;
  }
  CHECK(feasible > 10);
  CHECK(feasible < 290);
}

TEST_CASE("corrected supergradient divides by the bid slope") {
  const auto obs = linear_bids({20, 60}, 0.5);
  FpTestOptions opts;
  opts.supergradient = Supergradient::kCorrected;
  opts.bid_slope = 0.5;
  const LPSystem direct = build_fp_constraints(obs, kBelief);
  const LPSystem corrected = build_fp_constraints(obs, kBelief, opts);
  REQUIRE(direct.num_constraints() == corrected.num_constraints());
  CHECK(corrected.constraints()[0].rhs == doctest::Approx(2.0 * direct.constraints()[0].rhs));
  opts.bid_slope = 0.0;
  CHECK_THROWS_AS(build_fp_constraints(obs, kBelief, opts), DomainError);
}

TEST_CASE("NCSP single observation with gamma above the value") {
  const std::vector<Observation> obs{{1, 40.0, 20.0}};
  const LPSystem lp = build_ncsp_constraints(obs, kBelief, 50.0);
  CHECK(lp.num_variables() == 1);
  REQUIRE(lp.num_constraints() == 1);
  CHECK(lp.constraints()[0].label == "response-fp");
  CHECK(lp.constraints()[0].rhs == 0.0);
  CHECK(check_feasible(lp));
  CHECK(check_feasible(build_ncsp_constraints(obs, kBelief, 30.0)));
  CHECK(check_feasible(build_ncsp_constraints(obs, kBelief, 5.0)));
  CHECK_THROWS_AS(build_ncsp_constraints(obs, kBelief, 0.0), DomainError);
}

TEST_CASE("NCSP with gamma above every bid has no overcharge response rows") {
  auto rng = stream_rng(23, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const SubjectData s = random_fp_subject(rng, 8);
    double top = 0.0;
    for (const auto& o : s.observations()) top = std::max(top, o.bid);
    const LPSystem lp = build_ncsp_constraints(s.observations(), kBelief, top + 1.0);
    CHECK(lp.count_labelled("response-ncsp") == 0);
    CHECK(lp.count_labelled("response-fp") > 0);
    const LPSystem low = build_ncsp_constraints(s.observations(), kBelief, 0.5);
    CHECK(low.count_labelled("response-fp") + low.count_labelled("response-ncsp") ==
          lp.count_labelled("response-fp"));
  }
}

TEST_CASE("NCSP with gamma above every value reduces to pairwise best-response checks") {
  // With no overcharge rows each (k, j) pair has its own level and
  // multiplier, so the system is feasible exactly when a lower bid never
  // came with a higher value among comparable observations.
  auto oracle = [](const std::vector<Observation>& obs) {
    for (const auto& k : obs) {
      for (const auto& j : obs) {
        if (j.bid > k.theta) continue;
        if (j.bid < k.bid && !(j.theta < k.theta)) return false;
        if (j.bid == k.bid && j.theta > k.theta) return false;
      }
    }
    return true;
  };
  auto rng = stream_rng(29, 0);
  int feasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const SubjectData s = random_fp_subject(rng, 2 + trial % 5);
    const bool lp = consistent(ncsp_builder(150.0), s.observations());
    CHECK(lp == oracle(s.observations()));
    feasible += lp;
  }
  CHECK(feasible > 10);
}

TEST_CASE("NCSP with a large gamma accepts linear first-price style bidding") {
  for (double c : {0.3, 0.5, 0.8}) {
    const auto obs = linear_bids({5, 17, 33, 48, 61, 72, 80, 91, 99}, c);
    REQUIRE(consistent(fp_builder(), obs));
    CHECK(consistent(ncsp_builder(150.0), obs));
    CHECK(consistent(ncsp_builder(100.0), obs));
  }
}

TEST_CASE("simulated NCSP equilibrium subjects are not rejected") {
  for (double gamma : {5.0, 10.0}) {
    const BidFunction b = solve_ncsp_equilibrium(kUniform, 2, gamma);
    auto rng = stream_rng(31, 0);
    for (int subject = 0; subject < 40; ++subject) {
      std::vector<Observation> obs;
      for (int r = 1; r <= 10; ++r) {
        const int v = kUniform.sample_integer(rng);
        obs.push_back({r, double(v), b(v)});
      }
      const auto res = hmi(SubjectData("E", obs), ncsp_builder(gamma));
      CHECK(res.hmi == 1.0);
    }
  }
}

TEST_CASE("reversed NCSP signs reject equilibrium data") {
  const BidFunction b = solve_ncsp_equilibrium(kUniform, 2, 10.0);
  const auto obs = std::vector<Observation>{{1, 30.0, b(30.0)}, {2, 70.0, b(70.0)}};
  NcspTestOptions reversed;
  reversed.signs = NcspSigns::kReversed;
  CHECK(check_feasible(build_ncsp_constraints(obs, kBelief, 10.0)));
  CHECK_FALSE(check_feasible(build_ncsp_constraints(obs, kBelief, 10.0, reversed)));
}

TEST_CASE("HMI of consistent data is one") {
  const SubjectData s("C", linear_bids({10, 25, 40, 55, 70, 85, 100}, 0.5));
  const auto r = hmi(s, fp_builder());
  CHECK(r.hmi == 1.0);
  CHECK(r.max_consistent_size == 7);
  const auto l = hmi_learning(s, fp_builder());
  CHECK(l.weighted_cost == 0);
}

TEST_CASE("HMI drops a single planted violation") {
  auto obs = linear_bids({50, 60, 70, 80, 90, 95, 100, 65, 75}, 0.5);
  obs.push_back({10, 30.0, 0.0});
  REQUIRE_FALSE(fp_oracle(obs));
  const SubjectData s("P", obs);
  const auto r = hmi(s, fp_builder());
  CHECK(r.max_consistent_size == 9);
  CHECK(r.hmi == doctest::Approx(0.9));
  CHECK(std::find(r.kept.begin(), r.kept.end(), 9) == r.kept.end());
}

TEST_CASE("HMI keeps vacuous observations and drops forced ones") {
  const SubjectData s("Z", {{1, 0.0, 0.0}, {2, 40.0, 40.0}, {3, 60.0, 30.0}, {4, 20.0, 10.0}});
  const auto r = hmi(s, fp_builder());
  CHECK(r.kept == std::vector<std::size_t>{0, 2, 3});
  CHECK(r.hmi == doctest::Approx(0.75));
  const auto without = hmi(SubjectData("Z2", {{1, 60.0, 30.0}, {2, 20.0, 10.0}}), fp_builder());
  CHECK(without.hmi == 1.0);
}

TEST_CASE("HMI matches brute force and its kept subset is feasible") {
  auto rng = stream_rng(37, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const SubjectData s = random_fp_subject(rng, 7);
    const auto r = hmi(s, fp_builder());
    CHECK(r.max_consistent_size == brute_force_max(s, fp_builder()));
    std::vector<Observation> kept;
    for (auto i : r.kept) kept.push_back(s[i]);
    CHECK(consistent(fp_builder(), kept));
  }
}

TEST_CASE("HMI is monotone in the data") {
  auto rng = stream_rng(41, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const SubjectData big = random_fp_subject(rng, 8);
    auto fewer = big.observations();
    fewer.pop_back();
    const auto a = hmi(SubjectData("a", fewer), fp_builder()).max_consistent_size;
    const auto b = hmi(big, fp_builder()).max_consistent_size;
    CHECK(b >= a);
    CHECK(b <= a + 1);
    const auto r = hmi(big, fp_builder());
    for (std::size_t drop = 0; drop < r.kept.size(); ++drop) {
      std::vector<Observation> sub;
      for (std::size_t i = 0; i < r.kept.size(); ++i) {
        if (i != drop) sub.push_back(big[r.kept[i]]);
      }
      CHECK(consistent(fp_builder(), sub));
    }
  }
}

TEST_CASE("HMI size bounds") {
  const SubjectData s21("L", linear_bids(std::vector<int>(21, 40), 0.5));
  CHECK_THROWS_AS(hmi(s21, fp_builder()), SizeError);
  const SubjectData s13("L", linear_bids(std::vector<int>(13, 40), 0.5));
  CHECK_THROWS_AS(hmi_learning(s13, fp_builder()), SizeError);
  const SubjectData s20("L", linear_bids(std::vector<int>(20, 40), 0.5));
  CHECK(hmi(s20, fp_builder()).hmi == 1.0);
}

TEST_CASE("learning-weighted HMI prefers dropping early rounds") {
  // Round 9 conflicts with every round 1..8; round 10 conflicts with nothing.
  const ConstraintBuilder forced = [](const std::vector<Observation>& obs) {
    bool late = false;
    bool early = false;
    for (const auto& o : obs) {
      late = late || o.round == 9;
      early = early || o.round <= 8;
    }
    if (late && early) return infeasible_system();
    return LPSystem{};
  };
  const SubjectData s("F", linear_bids({10, 20, 30, 40, 50, 60, 70, 80, 90, 100}, 0.5));
  const auto l = hmi_learning(s, forced);
  CHECK(l.weighted_cost == 111111110ULL);
  CHECK(l.kept == std::vector<std::size_t>{8, 9});
  CHECK(l.hmi == doctest::Approx(0.2));
  const auto u = hmi(s, forced);
  CHECK(u.max_consistent_size == 9);
}

TEST_CASE("learning-weighted HMI matches exhaustive weighted search") {
  auto rng = stream_rng(43, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const SubjectData s = random_fp_subject(rng, n);
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      if (!consistent(fp_builder(), subset(s, mask))) continue;
      std::uint64_t cost = 0;
      std::uint64_t w = 1;
      for (std::size_t i = 0; i < n; ++i) {
        w *= n;
        if (!(mask >> i & 1U)) cost += w;
      }
      best = std::min(best, cost);
    }
    const auto l = hmi_learning(s, fp_builder());
    CHECK(l.weighted_cost == best);
    std::vector<Observation> kept;
    for (auto i : l.kept) kept.push_back(s[i]);
    CHECK(consistent(fp_builder(), kept));
    CHECK((l.hmi == 1.0) == (hmi(s, fp_builder()).hmi == 1.0));
  }
}

TEST_CASE("power thresholds") {
  const std::vector<double> sample{1.0, 0.9, 0.9, 0.9, 0.9, 0.8, 0.8, 0.8, 0.8, 0.8};
  CHECK(power_threshold(sample, 0.10) == 1.0);
  CHECK(power_threshold(sample, 0.5) == 0.9);
  CHECK(std::isinf(power_threshold(sample, 0.05)));
  CHECK(power_threshold(sample, 1.0) == 0.0);
  CHECK_THROWS_AS(power_threshold({}, 0.1), UndefinedStatisticError);
}

TEST_CASE("random subjects respect their values") {
  auto rng = stream_rng(47, 0);
  for (int i = 0; i < 200; ++i) {
    const SubjectData s = random_subject(10, rng);
    CHECK(s.size() == 10);
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK(s[j].bid <= s[j].theta);
      CHECK(s.status(j) != ObservationStatus::kDominated);
    }
  }
}

TEST_CASE("power calibration is deterministic in the seed") {
  const SubjectScorer scorer = [](const SubjectData& s) { return hmi(s, fp_builder()).hmi; };
  const auto a = bronars_power(200, 10, scorer, 5);
  const auto b = bronars_power(200, 10, scorer, 5);
  const auto c = bronars_power(200, 10, scorer, 6);
  CHECK(a.random_hmi == b.random_hmi);
  CHECK(a.random_hmi != c.random_hmi);
  REQUIRE(a.levels.size() == 2);
  CHECK(a.threshold(0.10) == a.levels[0].threshold);
  for (double p : {0.10, 0.05}) {
    const double t = a.threshold(p);
    const auto reach = std::count_if(a.random_hmi.begin(), a.random_hmi.end(),
                                     [t](double h) { return h >= t; });
    CHECK(double(reach) / a.random_hmi.size() <= p);
  }
}

TEST_CASE("pass rate report") {
  PowerCalibration cal;
  cal.levels = {{0.10, 0.9}, {0.05, 1.0}};
  const auto r = pass_rate_report({1.0, 1.0, 0.9, 0.5}, cal);
  CHECK(r.n_subjects == 4);
  CHECK(r.exact == 2);
  CHECK(r.pass_p10 == 3);
  CHECK(r.pass_p05 == 2);
  CHECK(r.exact_rate() == 0.5);
  CHECK_THROWS_AS(pass_rate_report({}, cal), UndefinedStatisticError);
}

TEST_CASE("two-proportion test") {
  CHECK(two_proportion_p_value(50, 100, 30, 100) == doctest::Approx(0.003892).epsilon(1e-3));
  CHECK(two_proportion_p_value(10, 10, 10, 10) == 1.0);
  CHECK(two_proportion_p_value(40, 100, 40, 100) == doctest::Approx(1.0));
  CHECK_THROWS_AS(two_proportion_p_value(1, 0, 1, 2), UndefinedStatisticError);
}

TEST_CASE("kernel cdf integrates the kernel density") {
  const GaussianKde kde({10.0, 12.0, 30.0, 31.0, 70.0}, 3.0);
  const double h = 0.01;
  double integral = 0.0;
  for (double x = -40.0; x < 45.0; x += h) integral += 0.5 * (kde.pdf(x) + kde.pdf(x + h)) * h;
  CHECK(kde.cdf(45.0) == doctest::Approx(integral).epsilon(1e-6));
  CHECK_THROWS_AS(GaussianKde({}, 1.0), DomainError);
  CHECK_THROWS_AS(GaussianKde({1.0}, 0.0), DomainError);
}

TEST_CASE("Silverman bandwidth") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const double sd = std::sqrt(2.5);
  CHECK(silverman_bandwidth(x) == doctest::Approx(1.06 * sd * std::pow(5.0, -0.2)));
  const std::vector<double> flat{4.0, 4.0, 4.0};
  CHECK(silverman_bandwidth(flat) == 1.0);
  CHECK(silverman_bandwidth(flat, 0.25) == 0.25);
}

TEST_CASE("population belief from a single pooled point") {
  auto kde = std::make_shared<const GaussianKde>(std::vector<double>{20.0}, 2.0);
  CHECK(kde->cdf(20.0) == doctest::Approx(0.5));
  const WinBelief belief = WinBelief::population(kde, 2);
  const auto obs = linear_bids({30, 40, 60}, 0.5);
  const LPSystem lp = build_fp_constraints(obs, belief);
  CHECK_NOTHROW(lp.validate());
  CHECK(lp.count_labelled("concavity") == 6);
}

TEST_CASE("population belief is degenerate below the support of opponent bids") {
  auto kde = std::make_shared<const GaussianKde>(std::vector<double>{100.0}, 0.1);
  const WinBelief belief = WinBelief::population(kde, 2);
  CHECK_THROWS_AS(belief.log_slope(10.0, 0.0), DegenerateObservationError);
  CHECK_THROWS_AS(build_fp_constraints({{1, 10.0, 0.0}}, belief), DegenerateObservationError);
}

TEST_CASE("population belief on uniform half-value bids approaches the equilibrium test") {
  std::vector<double> pooled(100000);
  for (std::size_t i = 0; i < pooled.size(); ++i) pooled[i] = 50.0 * (i + 0.5) / pooled.size();
  auto kde = std::make_shared<const GaussianKde>(pooled, silverman_bandwidth(pooled));
  const WinBelief belief = WinBelief::population(kde, 2);
  for (double b = 10.0; b <= 45.0; b += 5.0) CHECK(belief.log_slope(2 * b, b) * b == doctest::Approx(1.0).epsilon(0.05));
  auto rng = stream_rng(53, 0);
  std::uniform_int_distribution<int> value(20, 90);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> values;
    for (int r = 0; r < 10; ++r) values.push_back(value(rng));
    const auto obs = linear_bids(values, 0.5);
    const bool eq = consistent(fp_builder(), obs);
    const bool pop = consistent(
        [&](const std::vector<Observation>& o) { return build_fp_constraints(o, belief); }, obs);
    CHECK(eq == pop);
  }
}
