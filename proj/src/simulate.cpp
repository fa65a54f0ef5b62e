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

#include "auctionlab/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "auctionlab/errors.hpp"
#include "auctionlab/parallel.hpp"

namespace auctionlab {

namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

BidderStrategy BidderStrategy::truthful() { return BidderStrategy{}; }

BidderStrategy BidderStrategy::linear(double coefficient) {
  if (!(coefficient >= 0.0 && coefficient <= 1.5))
    throw DomainError("linear bid coefficient must lie in [0, 1.5]");
  BidderStrategy s;
  s.kind_ = Kind::kLinear;
  s.coefficient_ = coefficient;
  return s;
}

BidderStrategy BidderStrategy::random_uniform() {
  BidderStrategy s;
  s.kind_ = Kind::kRandomUniform;
  return s;
}

BidderStrategy BidderStrategy::equilibrium(BidFunction bidfn) {
  BidderStrategy s;
  s.kind_ = Kind::kEquilibrium;
  s.table_ = std::make_shared<const BidFunction>(std::move(bidfn));
  return s;
}

BidderStrategy BidderStrategy::table(BidFunction bidfn) {
  BidderStrategy s = equilibrium(std::move(bidfn));
  s.kind_ = Kind::kTable;
  return s;
}

double BidderStrategy::bid(int value, std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::kTruthful: return value;
    case Kind::kLinear: return std::min(100.0, coefficient_ * value);
    case Kind::kRandomUniform: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      return u(rng) * value;
    }
    case Kind::kEquilibrium:
    case Kind::kTable: return (*table_)(value);
  }
  return value;
}

std::string BidderStrategy::describe() const {
  switch (kind_) {
    case Kind::kTruthful: return "truthful";
    case Kind::kLinear: return "linear:" + format_number(coefficient_);
    case Kind::kRandomUniform: return "random_uniform";
    case Kind::kEquilibrium: return "equilibrium";
    case Kind::kTable: return "table";
  }
  return "?";
}

SellerStrategy SellerStrategy::rule_following() { return SellerStrategy{}; }

SellerStrategy SellerStrategy::gamma_overcharger(double gamma, double sigma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("overcharger gamma must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("overcharger sigma must be >= 0");
  SellerStrategy s;
  s.kind_ = Kind::kGammaOvercharger;
  s.gamma_ = gamma;
  s.sigma_ = sigma;
  return s;
}

SellerStrategy SellerStrategy::ratio_type(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw DomainError("ratio_type s must lie in [0, 1]");
  SellerStrategy s;
  s.kind_ = Kind::kRatioType;
  s.ratio_ = ratio;
  return s;
}

SellerStrategy SellerStrategy::always_max() {
  SellerStrategy s;
  s.kind_ = Kind::kAlwaysMax;
  return s;
}

SellerStrategy SellerStrategy::random_winner() {
  SellerStrategy s;
  s.kind_ = Kind::kRandomWinner;
  return s;
}

std::string SellerStrategy::describe() const {
  switch (kind_) {
    case Kind::kRuleFollowing: return "rule_following";
    case Kind::kGammaOvercharger:
      return "gamma_overcharger:" + format_number(gamma_) + ":" + format_number(sigma_);
    case Kind::kRatioType: return "ratio_type:" + format_number(ratio_);
    case Kind::kAlwaysMax: return "always_max";
    case Kind::kRandomWinner: return "random_winner";
  }
  return "?";
}

Outcome settle(const std::array<double, 2>& bids, Treatment treatment, const SellerStrategy& seller,
               std::mt19937_64& rng) {
  const int top = bids[1] > bids[0] ? 1 : 0;
  const double high = bids[top];
  const double low = bids[1 - top];
  switch (treatment) {
    case Treatment::kFP: return {top, high};
    case Treatment::kCSP: return {top, low};
    case Treatment::kNCSP: break;
  }
  switch (seller.kind()) {
    case SellerStrategy::Kind::kRuleFollowing: return {top, low};
    case SellerStrategy::Kind::kGammaOvercharger: {
      double price = low + seller.gamma();
      if (seller.sigma() > 0.0) {
        std::normal_distribution<double> noise(0.0, seller.sigma());
        price += noise(rng);
      }
      return {top, std::clamp(price, low, high)};
    }
    case SellerStrategy::Kind::kRatioType: return {top, low + seller.ratio() * (high - low)};
    case SellerStrategy::Kind::kAlwaysMax: return {top, high};
    case SellerStrategy::Kind::kRandomWinner: {
      std::bernoulli_distribution coin(0.5);
      return {coin(rng) ? 1 : 0, low};
    }
  }
  return {top, low};
}

void SimConfig::validate() const {
  if (n_rounds < 1) throw InputError("rounds must be >= 1");
  if (groups < 1) throw InputError("groups must be >= 1");
  if (session_id.empty()) throw InputError("session_id must not be empty");
}

RoundRecord run_auction(const std::array<int, 2>& values,
                        const std::array<const BidderStrategy*, 2>& strategies, Treatment treatment,
                        const SellerStrategy& seller, std::mt19937_64& rng, bool integer_bids) {
  RoundRecord r;
  r.treatment = treatment;
  std::array<double, 2> bids{};
  for (int i = 0; i < 2; ++i) {
    double b = strategies[i]->bid(values[i], rng);
    if (integer_bids) b = std::round(b);
    bids[i] = std::clamp(b, 0.0, 100.0);
    r.values[i] = values[i];
    r.bids[i] = bids[i];
    r.bidder_ids[i] = "B" + std::to_string(i + 1);
  }
  const Outcome o = settle(bids, treatment, seller, rng);
  r.seller_id = "S1";
  r.winner_id = r.bidder_ids[o.winner_index];
  r.price = o.price;
  return r;
}

Dataset run_session(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n_rounds = static_cast<std::size_t>(cfg.n_rounds);
  const std::size_t groups = static_cast<std::size_t>(cfg.groups);
  std::vector<RoundRecord> records(n_rounds * groups);

  parallel_for(n_rounds, [&](std::size_t r) {
    std::mt19937_64 rng = stream_rng(cfg.seed, r);
    std::vector<std::size_t> bidders(2 * groups);
    std::vector<std::size_t> sellers(groups);
    std::iota(bidders.begin(), bidders.end(), 0);
    std::iota(sellers.begin(), sellers.end(), 0);
    if (cfg.rematch) {
      std::shuffle(bidders.begin(), bidders.end(), rng);
      std::shuffle(sellers.begin(), sellers.end(), rng);
    }
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t p0 = bidders[2 * g];
      const std::size_t p1 = bidders[2 * g + 1];
      const std::array<int, 2> values{cfg.values.sample_integer(rng), cfg.values.sample_integer(rng)};
      const std::array<const BidderStrategy*, 2> strategies{&cfg.bidders[p0 % 2], &cfg.bidders[p1 % 2]};
      RoundRecord rec = run_auction(values, strategies, cfg.treatment, cfg.seller, rng, cfg.integer_bids);
      const int w = rec.winner_index();
      rec.session_id = cfg.session_id;
      rec.round = static_cast<int>(r) + 1;
      rec.bidder_ids[0] = "B" + std::to_string(p0 + 1);
      rec.bidder_ids[1] = "B" + std::to_string(p1 + 1);
      rec.winner_id = rec.bidder_ids[w];
      rec.seller_id = "S" + std::to_string(sellers[g] + 1);
      records[r * groups + g] = std::move(rec);
    }
  });

  Dataset d;
  d.meta.source = "simulation";
  d.meta.seed = cfg.seed;
  d.rounds = std::move(records);
  d.bids = bids_from_rounds(d.rounds);
  return d;
}

double efficiency(const Dataset& d) {
  if (d.rounds.empty()) throw UndefinedStatisticError("efficiency of an empty dataset");
  std::size_t efficient = 0;
  for (const auto& r : d.rounds) {
    const int w = r.winner_index();
    if (w < 0) continue;
    if (r.values[w] >= r.values[1 - w]) ++efficient;
  }
  return static_cast<double>(efficient) / static_cast<double>(d.rounds.size());
}

std::optional<double> overcharging_ratio(const RoundRecord& r) {
  const double high = r.high_bid();
  const double low = r.low_bid();
  if (high == low) return std::nullopt;
  return (r.price - low) / (high - low);
}

RevenueStats revenue_stats(const Dataset& d) {
  if (d.rounds.empty()) throw UndefinedStatisticError("revenue of an empty dataset");
  RevenueStats s;
  s.n_rounds = d.rounds.size();
  double sum = 0.0;
  for (const auto& r : d.rounds) sum += r.price;
  s.mean = sum / static_cast<double>(s.n_rounds);

  std::map<std::string, double> score;  // sum of residuals per session
  for (const auto& r : d.rounds) score[r.session_id] += r.price - s.mean;
  const double n = static_cast<double>(s.n_rounds);
  if (score.size() >= 2) {
    const double g = static_cast<double>(score.size());
    double meat = 0.0;
    for (const auto& [id, e] : score) meat += e * e;
    s.n_clusters = score.size();
    s.std_error = std::sqrt(g / (g - 1.0) * meat) / n;
  } else {
    s.n_clusters = s.n_rounds;
    double ss = 0.0;
    for (const auto& r : d.rounds) ss += (r.price - s.mean) * (r.price - s.mean);
    s.std_error = s.n_rounds > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  return s;
}

OverchargeStats overcharge_stats(const Dataset& d) {
  OverchargeStats s;
  double sum = 0.0;
  std::size_t positive = 0;
  for (const auto& r : d.rounds) {
    if (r.treatment != Treatment::kNCSP) continue;
    ++s.ncsp_rounds;
    if (const auto ratio = overcharging_ratio(r)) {
      ++s.defined_rounds;
      sum += *ratio;
      if (*ratio > 0.0) ++positive;
    }
  }
  if (s.defined_rounds > 0) {
    s.mean_ratio = sum / static_cast<double>(s.defined_rounds);
    s.share_overcharging = static_cast<double>(positive) / static_cast<double>(s.defined_rounds);
  }
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

class LineError {
 public:
  explicit LineError(int line) : line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("line " + std::to_string(line_) + ": " + msg);
  }

 private:
  int line_;
};

double to_double(const std::string& s, const LineError& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) where.fail("not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& s, const LineError& where) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) where.fail("not an integer: '" + s + "'");
  return v;
}

std::uint64_t to_seed(const std::string& s, const LineError& where) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) where.fail("not an unsigned 64-bit seed: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, const LineError& where) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  where.fail("not a boolean: '" + s + "'");
}

SellerStrategy parse_seller(const std::string& spec, const LineError& where) {
  const auto parts = split(spec, ':');
  const std::string& kind = parts[0];
  try {
    if (kind == "rule_following" && parts.size() == 1) return SellerStrategy::rule_following();
    if (kind == "always_max" && parts.size() == 1) return SellerStrategy::always_max();
    if (kind == "random_winner" && parts.size() == 1) return SellerStrategy::random_winner();
    if (kind == "ratio_type" && parts.size() == 2)
      return SellerStrategy::ratio_type(to_double(parts[1], where));
    if (kind == "gamma_overcharger" && (parts.size() == 2 || parts.size() == 3)) {
      const double sigma = parts.size() == 3 ? to_double(parts[2], where) : 0.0;
      return SellerStrategy::gamma_overcharger(to_double(parts[1], where), sigma);
    }
  } catch (const DomainError& e) {
    where.fail(e.what());
  }
  where.fail("unknown seller strategy '" + spec +
             "' (rule_following | gamma_overcharger:<gamma>[:<sigma>] | ratio_type:<s> | "
             "always_max | random_winner)");
}

struct PendingBidder {
  std::string spec;
  int line = 0;
};

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
  SimConfig cfg;
  std::set<std::string> seen;
  std::array<PendingBidder, 2> bidder_specs{PendingBidder{"truthful", 0}, PendingBidder{"truthful", 0}};
  std::optional<double> equilibrium_gamma;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('\n', pos);
    const auto raw = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    ++line_no;
    const LineError where(line_no);
    std::string line(raw);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) where.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) where.fail("missing key");
    if (value.empty()) where.fail("missing value for '" + key + "'");
    if (!seen.insert(key).second) where.fail("duplicate key '" + key + "'");

    if (key == "treatment") {
      try {
        cfg.treatment = parse_treatment(value);
      } catch (const InputError& e) {
        where.fail(e.what());
      }
    } else if (key == "rounds") {
      const auto v = to_integer(value, where);
      if (v < 1 || v > 100000000) where.fail("rounds must lie in [1, 1e8]");
      cfg.n_rounds = static_cast<int>(v);
    } else if (key == "groups") {
      const auto v = to_integer(value, where);
      if (v < 1 || v > 1000000) where.fail("groups must lie in [1, 1e6]");
      cfg.groups = static_cast<int>(v);
    } else if (key == "rematch") {
      cfg.rematch = to_bool(value, where);
    } else if (key == "seed") {
      cfg.seed = to_seed(value, where);
    } else if (key == "session_id") {
      if (value.find(',') != std::string::npos) where.fail("session_id must not contain ','");
      cfg.session_id = value;
    } else if (key == "integer_bids") {
      cfg.integer_bids = to_bool(value, where);
    } else if (key == "bidder1" || key == "bidder2") {
      bidder_specs[key == "bidder1" ? 0 : 1] = {value, line_no};
    } else if (key == "seller") {
      cfg.seller = parse_seller(value, where);
    } else if (key == "equilibrium_gamma") {
      const double g = to_double(value, where);
      if (!(g > 0.0)) where.fail("equilibrium_gamma must be > 0");
      equilibrium_gamma = g;
    } else {
      where.fail("unknown key '" + key + "'");
    }
  }

  std::optional<BidFunction> solved;
  for (int i = 0; i < 2; ++i) {
    const LineError where(bidder_specs[i].line);
    const auto parts = split(bidder_specs[i].spec, ':');
    const std::string& kind = parts[0];
    if (kind == "truthful" && parts.size() == 1) {
      cfg.bidders[i] = BidderStrategy::truthful();
    } else if (kind == "random_uniform" && parts.size() == 1) {
      cfg.bidders[i] = BidderStrategy::random_uniform();
    } else if (kind == "linear" && parts.size() == 2) {
      try {
        cfg.bidders[i] = BidderStrategy::linear(to_double(parts[1], where));
      } catch (const DomainError& e) {
        where.fail(e.what());
      }
    } else if (kind == "equilibrium" && parts.size() == 1) {
      if (!solved) {
        switch (cfg.treatment) {
          case Treatment::kFP: solved = tabulate_fp(cfg.values, 2, 1001); break;
          case Treatment::kCSP: solved = tabulate_csp(cfg.values, 1001); break;
          case Treatment::kNCSP: {
            double g = 0.0;
            if (equilibrium_gamma) {
              g = *equilibrium_gamma;
            } else if (cfg.seller.kind() == SellerStrategy::Kind::kGammaOvercharger &&
                       cfg.seller.gamma() > 0.0) {
              g = cfg.seller.gamma();
            } else {
              where.fail("NCSP equilibrium bidders need equilibrium_gamma or a gamma_overcharger seller");
            }
            solved = solve_ncsp_equilibrium(cfg.values, 2, g);
            break;
          }
        }
      }
      cfg.bidders[i] = BidderStrategy::equilibrium(*solved);
    } else {
      where.fail("unknown bidder strategy '" + bidder_specs[i].spec +
                 "' (truthful | linear:<c> | random_uniform | equilibrium)");
    }
  }
  return cfg;
}

}  // namespace auctionlab
