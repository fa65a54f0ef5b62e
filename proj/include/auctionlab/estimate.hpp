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

#include <cstddef>
#include <string>
#include <vector>

#include "auctionlab/core.hpp"

namespace auctionlab {

/// One NCSP round seen by the tobit model: overcharge o = price - b_min,
/// clamped to [0, u] with u = b_max - b_min > 0.
struct CensoredObservation {
  double overcharge = 0.0;
  double upper = 0.0;
  std::string seller_id;
};

/// NCSP rounds with a positive bid gap; others are skipped.
std::vector<CensoredObservation> censored_sample(const Dataset& d);

struct TobitResult {
  double gamma = 0.0;
  double sigma = 0.0;
  /// +inf when every uncensored overcharge coincides (degenerate limit).
  double loglik = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_uncensored = 0;
  std::size_t n_lower = 0;
  std::size_t n_upper = 0;
  int iterations = 0;
};

/// Maximum likelihood for o* = gamma + eps, eps ~ N(0, sigma^2), observed
/// clamped to [0, u]. Newton iterations on (gamma, ln sigma) until the
/// gradient sup-norm falls below 1e-8. Throws IdentificationError with fewer
/// than two uncensored observations, SolverError without convergence.
TobitResult estimate_gamma(const std::vector<CensoredObservation>& sample);

/// Least squares without intercept. Rows of `x` are observations.
struct Design {
  std::vector<std::string> names;
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<std::string> cluster;
};

struct RegressionResult {
  std::vector<std::string> names;
  std::vector<double> coefficients;
  /// Cluster-robust, factor G/(G-1) (N-1)/(N-K).
  std::vector<double> std_errors;
  std::size_t n_obs = 0;
  std::size_t n_clusters = 0;
};

/// Throws IdentificationError on a rank-deficient design, N <= K, or fewer
/// than two clusters; InputError on ragged input.
RegressionResult ols_origin(const Design& design);

/// bid on value x 1[treatment = t] for each treatment present in the bidder
/// records (in FP, CSP, NCSP order), clustered by subject.
Design bid_value_design(const std::vector<BidRecord>& bids);

struct BidValueCoefficient {
  double coefficient = 0.0;
  std::size_t used = 0;
  std::size_t excluded_zero_value = 0;
};

/// Mean bid/value ratio over records with value > 0. Throws
/// UndefinedStatisticError when no such record exists.
BidValueCoefficient bid_value_coefficient(const std::vector<BidRecord>& records);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q((sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D). Throws UndefinedStatisticError on
/// an empty sample.
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

/// Welch two-sample t-test, two-sided. Requires at least two values per
/// sample. Zero variance in both samples gives 1 for equal means, 0 otherwise.
double t_test_two_sided(const std::vector<double>& x, const std::vector<double>& y);

enum class SellerType { kNever, kSometimes, kAlways };

std::string_view to_string(SellerType t) noexcept;

struct SellerRow {
  std::string session_id;
  std::string seller_id;
  std::size_t rounds = 0;
  std::size_t defined_rounds = 0;
  std::size_t overcharging_rounds = 0;
  double coefficient = 0.0;
  SellerType type = SellerType::kNever;
};

struct SellerTypeTable {
  std::vector<SellerRow> rows;
  /// Sellers whose rounds all had equal bids.
  std::vector<std::string> excluded;

  std::size_t count(SellerType t) const;
};

/// Per-seller overcharging coefficient (mean defined ratio) and type over
/// NCSP rounds.
SellerTypeTable classify_sellers(const Dataset& d);

}  // namespace auctionlab
