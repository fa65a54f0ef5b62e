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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "auctionlab/core.hpp"
#include "auctionlab/kde.hpp"
#include "auctionlab/lp.hpp"

namespace auctionlab {

/// One (value, bid) observation of a subject.
struct Observation {
  int round = 0;
  double theta = 0.0;
  double bid = 0.0;
};

enum class ObservationStatus {
  /// Enters the constraint system.
  kUsable,
  /// theta == 0: the only admissible bid is 0; consistent with every utility.
  kVacuous,
  /// bid == theta > 0: log-utility undefined; always dropped.
  kZeroSurplus,
  /// bid > theta: removed by the regular filter; always dropped.
  kDominated,
};

/// A subject's observations in round order. At most 64 observations.
class SubjectData {
 public:
  SubjectData() = default;
  SubjectData(std::string id, std::vector<Observation> observations);

  /// Builds one subject per bidder from bid records (all treatments mixed
  /// records are kept as given).
  static std::vector<SubjectData> from_records(const std::vector<BidRecord>& bids);

  const std::string& id() const noexcept { return id_; }
  std::size_t size() const noexcept { return obs_.size(); }
  const Observation& operator[](std::size_t i) const { return obs_[i]; }
  const std::vector<Observation>& observations() const noexcept { return obs_; }
  ObservationStatus status(std::size_t i) const { return status_[i]; }

  /// Indices of usable observations, ascending.
  std::vector<std::size_t> usable() const;
  std::size_t forced_drops() const;

 private:
  std::string id_;
  std::vector<Observation> obs_;
  std::vector<ObservationStatus> status_;
};

/// Winning-probability model held by the tested subject. The equilibrium
/// belief uses P(b) = F^{n-1}(theta); the population belief uses
/// P(b) = H(b)^{n-1} with H a kernel estimate of opponents' bids.
class WinBelief {
 public:
  static WinBelief equilibrium(ValueDistribution F, int n_bidders);
  static WinBelief population(std::shared_ptr<const GaussianKde> opponent_bids, int n_bidders);

  bool is_population() const noexcept { return kde_ != nullptr; }
  int n_bidders() const noexcept { return n_; }

  /// d ln P / d b at the observation. Equilibrium: (n-1) f(theta)/F(theta).
  /// Population: (n-1) h(b)/H(b). Throws DegenerateObservationError where
  /// P = 0.
  double log_slope(double theta, double bid) const;
  /// ln P at the observation: (n-1) ln F(theta) or (n-1) ln H(b).
  double log_win(double theta, double bid) const;

 private:
  ValueDistribution F_;
  int n_ = 2;
  std::shared_ptr<const GaussianKde> kde_;
};

enum class Supergradient {
  /// g_j taken from the win-probability belief at the observed value.
  kDirect,
  /// Direct supergradient times dtheta/db = 1 / bid_slope.
  kCorrected,
};

struct FpTestOptions {
  Supergradient supergradient = Supergradient::kDirect;
  /// Subject's bid/value slope, used by the corrected supergradient.
  double bid_slope = 1.0;
};

/// Utility-level system for first-price data. Variables nu^j <= 0; for every
/// ordered pair k != j the concavity row
///   nu^k - nu^j <= g_j ((theta^k-b^k) - (theta^j-b^j)),
/// labelled "concavity", and for every unordered pair an "order" row: an
/// equality when surpluses tie, otherwise the strict ordering of the levels.
/// Throws DegenerateObservationError on theta == 0 or a zero-probability bid.
LPSystem build_fp_constraints(const std::vector<Observation>& obs, const WinBelief& belief,
                              const FpTestOptions& opts = {});

enum class NcspSigns {
  /// lambda (b^j - b^k) and lambda (b^j - gamma) on the concavity rows.
  kSupergradient,
  /// lambda (b^k - b^j) and lambda (gamma - b^j).
  kReversed,
};

struct NcspTestOptions {
  NcspSigns signs = NcspSigns::kSupergradient;
};

/// Necessary conditions for NCSP data with rule-breaking tolerance gamma.
/// Variables nu^{k,j} <= 0 for b^j <= theta^k, nu^k_gamma <= 0 and
/// lambda^{k,j} > 0. Families, each only under its gate:
///   "concavity-bid"   nu^{k,k} - nu^{k,j} <= lambda^{k,j} (.)       b^j <= theta^k
///   "concavity-gamma" nu^k_gamma - nu^{k,j} <= lambda^{k,j} (.)     b^j <= theta^k, gamma <= theta^j
///   "response-fp"     lnP^k + nu^{k,k} >= lnP^j + nu^{k,j}          gamma >= b^k, b^j <= theta^k
///   "response-ncsp"   lnP^k + nu^k_gamma >= lnP^j + nu^{k,j}        gamma < b^k, b^j <= theta^k
/// Throws DomainError unless gamma > 0.
LPSystem build_ncsp_constraints(const std::vector<Observation>& obs, const WinBelief& belief,
                                double gamma, const NcspTestOptions& opts = {});

/// Builds the system for a subset of a subject's usable observations.
using ConstraintBuilder = std::function<LPSystem(const std::vector<Observation>&)>;

/// Feasibility of the builder's system for the given observations.
bool consistent(const ConstraintBuilder& builder, const std::vector<Observation>& obs,
                double strict_eps = kDefaultStrictEps);

struct HMIResult {
  std::size_t max_consistent_size = 0;
  /// max_consistent_size / |J|; 1 for an empty subject.
  double hmi = 1.0;
  /// Indices into the subject's observations, ascending.
  std::vector<std::size_t> kept;
  /// Learning variant: sum of |J|^j over dropped j (1-based round position).
  std::uint64_t weighted_cost = 0;
};

inline constexpr std::size_t kMaxHmiObservations = 20;
inline constexpr std::size_t kMaxLearningObservations = 12;

/// Largest consistent subset by enumeration, descending in size with early
/// exit. Vacuous observations are always kept; zero-surplus and dominated
/// ones are always dropped. Throws SizeError when |J| > 20.
HMIResult hmi(const SubjectData& s, const ConstraintBuilder& builder,
              double strict_eps = kDefaultStrictEps);

/// Consistent subset minimizing sum over dropped j of |J|^j, in exact integer
/// arithmetic. Throws SizeError when |J| > 12.
HMIResult hmi_learning(const SubjectData& s, const ConstraintBuilder& builder,
                       double strict_eps = kDefaultStrictEps);

struct PowerLevel {
  double p = 0.0;
  /// Smallest HMI counted as a pass; +inf when no level admits at most p.
  double threshold = 0.0;
};

struct PowerCalibration {
  std::vector<double> random_hmi;
  std::vector<PowerLevel> levels;

  /// Threshold at significance p (computed on demand for levels not stored).
  double threshold(double p) const;
};

/// Smallest t among the sample's HMI levels with share(hmi >= t) <= p; +inf
/// when none qualifies. p >= 1 gives 0.
double power_threshold(const std::vector<double>& sample, double p);

/// Scores a subject (e.g. HMI under a fixed test).
using SubjectScorer = std::function<double(const SubjectData&)>;

/// Synthetic subject i draws from stream_rng(seed, i): each round a fresh
/// integer value uniform on the distribution's support and a bid uniform on
/// [0, value].
SubjectData random_subject(std::size_t rounds, std::mt19937_64& rng,
                           const ValueDistribution& F = {}, const std::string& id = "R");

/// Scores n_synthetic random subjects in parallel and calibrates thresholds
/// at p = 0.10 and 0.05. Deterministic in seed.
PowerCalibration bronars_power(std::size_t n_synthetic, std::size_t rounds_per_subject,
                               const SubjectScorer& scorer, std::uint64_t seed,
                               const ValueDistribution& F = {});

struct PassRates {
  std::size_t n_subjects = 0;
  std::size_t exact = 0;
  std::size_t pass_p10 = 0;
  std::size_t pass_p05 = 0;

  double exact_rate() const;
  double rate_p10() const;
  double rate_p05() const;
};

/// Throws UndefinedStatisticError on an empty sample.
PassRates pass_rate_report(const std::vector<double>& hmis, const PowerCalibration& calibration);

/// Two-sided pooled two-proportion z-test; 1 when both proportions are
/// degenerate and equal. Throws UndefinedStatisticError on empty groups.
double two_proportion_p_value(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2);

}  // namespace auctionlab
