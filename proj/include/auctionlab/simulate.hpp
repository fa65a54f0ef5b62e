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

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "auctionlab/core.hpp"
#include "auctionlab/equilibrium.hpp"

namespace auctionlab {

class BidderStrategy {
 public:
  enum class Kind { kEquilibrium, kLinear, kTruthful, kRandomUniform, kTable };

  static BidderStrategy truthful();
  /// bid = coefficient * value, coefficient in [0, 1.5]; capped at 100.
  static BidderStrategy linear(double coefficient);
  /// bid ~ U[0, value].
  static BidderStrategy random_uniform();
  static BidderStrategy equilibrium(BidFunction bidfn);
  static BidderStrategy table(BidFunction bidfn);

  Kind kind() const noexcept { return kind_; }
  double coefficient() const noexcept { return coefficient_; }
  const BidFunction* bid_function() const noexcept { return table_.get(); }

  double bid(int value, std::mt19937_64& rng) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::kTruthful;
  double coefficient_ = 1.0;
  std::shared_ptr<const BidFunction> table_;
};

class SellerStrategy {
 public:
  enum class Kind { kRuleFollowing, kGammaOvercharger, kRatioType, kAlwaysMax, kRandomWinner };

  /// Highest bidder wins at the lowest bid.
  static SellerStrategy rule_following();
  /// Highest bidder wins at b_min + gamma + sigma * N(0,1), clamped to [b_min, b_max].
  static SellerStrategy gamma_overcharger(double gamma, double sigma);
  /// Highest bidder wins at b_min + s (b_max - b_min), s in [0, 1].
  static SellerStrategy ratio_type(double s);
  /// Highest bidder wins at the highest bid.
  static SellerStrategy always_max();
  /// Winner drawn uniformly from the bidders; price is the lower of the two bids.
  static SellerStrategy random_winner();

  Kind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }
  double sigma() const noexcept { return sigma_; }
  double ratio() const noexcept { return ratio_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::kRuleFollowing;
  double gamma_ = 0.0;
  double sigma_ = 0.0;
  double ratio_ = 0.0;
};

struct Outcome {
  int winner_index = 0;
  double price = 0.0;
};

/// Auction rules applied to a bid pair. FP: highest bid wins and pays it. CSP:
/// highest bid wins and pays the other bid. NCSP: the seller strategy picks
/// winner and price, price never above the winner's bid. Bid ties go to
/// bidder 0 under every rule.
Outcome settle(const std::array<double, 2>& bids, Treatment treatment, const SellerStrategy& seller,
               std::mt19937_64& rng);

struct SimConfig {
  Treatment treatment = Treatment::kCSP;
  int n_rounds = 10;
  /// Independent markets of two bidders and one seller.
  int groups = 1;
  /// Re-draw the bidder-to-market and seller-to-market assignment every round.
  bool rematch = false;
  std::array<BidderStrategy, 2> bidders{BidderStrategy::truthful(), BidderStrategy::truthful()};
  SellerStrategy seller = SellerStrategy::rule_following();
  std::uint64_t seed = 1;
  ValueDistribution values{0, 100};
  /// Round bids to the nearest integer token, as in the laboratory interface.
  bool integer_bids = false;
  std::string session_id = "S1";

  /// Throws InputError on invalid settings.
  void validate() const;
};

/// One market: values are given, bids come from the strategies.
RoundRecord run_auction(const std::array<int, 2>& values,
                        const std::array<const BidderStrategy*, 2>& strategies, Treatment treatment,
                        const SellerStrategy& seller, std::mt19937_64& rng,
                        bool integer_bids = false);

/// Simulates cfg.n_rounds rounds of cfg.groups markets. Round r draws all of
/// its randomness from stream_rng(cfg.seed, r), so rounds run concurrently and
/// the output is identical for identical configurations. Bidder b<k> (k =
/// 1..2*groups) uses cfg.bidders[(k-1) % 2]; sellers are S<k>.
Dataset run_session(const SimConfig& cfg);

/// Fraction of rounds won by a bidder with the (weakly) highest value.
/// Throws UndefinedStatisticError on an empty dataset.
double efficiency(const Dataset& d);

/// (price - b_min) / (b_max - b_min); empty when b_max == b_min.
std::optional<double> overcharging_ratio(const RoundRecord& r);

struct RevenueStats {
  double mean = 0.0;
  /// Standard error of the mean, clustered by session (per-round clusters
  /// when a single session is present).
  double std_error = 0.0;
  std::size_t n_rounds = 0;
  std::size_t n_clusters = 0;
};

RevenueStats revenue_stats(const Dataset& d);

struct OverchargeStats {
  std::size_t ncsp_rounds = 0;
  std::size_t defined_rounds = 0;
  double mean_ratio = 0.0;
  double share_overcharging = 0.0;
};

OverchargeStats overcharge_stats(const Dataset& d);

/// Parses the flat `key = value` configuration text. `#` starts a comment.
/// Unknown keys, duplicate keys and malformed values raise InputError with a
/// line number. An `equilibrium` bidder solves the treatment's equilibrium.
SimConfig parse_sim_config(std::string_view text);

}  // namespace auctionlab
