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
#include <span>
#include <vector>

#include "auctionlab/core.hpp"

namespace auctionlab {

/// Seller aversion to rule-breaking, summarized by the overcharge gamma at
/// which the marginal cost of overcharging reaches one.
struct SellerParams {
  double gamma = 10.0;

  /// Throws DomainError unless gamma is positive and finite.
  void validate() const;
};

struct SellerDecision {
  std::size_t winner_index = 0;
  double price = 0.0;
};

/// A monotone bidding strategy tabulated on an ascending value grid and
/// linearly interpolated between grid points.
class BidFunction {
 public:
  BidFunction() = default;
  BidFunction(std::vector<double> grid, std::vector<double> bids, Treatment treatment,
              double gamma = 0.0);

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& bids() const noexcept { return bids_; }
  std::size_t size() const noexcept { return grid_.size(); }
  Treatment treatment() const noexcept { return treatment_; }
  /// Zero for FP and CSP tabulations.
  double gamma() const noexcept { return gamma_; }

  /// Solver bookkeeping; zero for closed-form tabulations.
  double residual() const noexcept { return residual_; }
  std::size_t sweeps() const noexcept { return sweeps_; }
  double tolerance() const noexcept { return tolerance_; }
  void set_solver_info(double residual, std::size_t sweeps, double tolerance);

  /// Bid at value theta; theta is clamped to the grid range.
  double operator()(double theta) const;

  /// Monotone interpolated inverse. Bids below the tabulated range map to the
  /// lowest grid value, bids above it to the highest.
  double inverse(double bid) const;

  /// True when no tabulated bid decreases (up to 1e-12) and the bid range is
  /// non-degenerate.
  bool is_increasing() const;

 private:
  std::vector<double> grid_;
  std::vector<double> bids_;
  Treatment treatment_ = Treatment::kFP;
  double gamma_ = 0.0;
  double residual_ = 0.0;
  std::size_t sweeps_ = 0;
  double tolerance_ = 0.0;
};

/// E[highest rival value | highest rival value < theta]; ((n-1)/n) theta for
/// the uniform law on [0, upper]. Throws DomainError for n < 2 or theta out of
/// range.
double fp_bid(double theta, const ValueDistribution& F, int n);

/// Truthful bidding, the dominant strategy of the credible second-price auction.
double csp_bid(double theta);

/// Evenly spaced grid of `grid_size` points over [F.lower(), F.upper()].
std::vector<double> value_grid(const ValueDistribution& F, std::size_t grid_size);

BidFunction tabulate_fp(const ValueDistribution& F, int n, std::size_t grid_size);
BidFunction tabulate_csp(const ValueDistribution& F, std::size_t grid_size);

/// Optimal seller choice against a profile of bids: the highest bidder wins
/// (lowest index among ties) at min{highest bid, second-highest bid + gamma}.
SellerDecision seller_best_response(std::span<const double> bids, const SellerParams& seller);

struct NcspSolverOptions {
  std::size_t grid_size = 1001;
  double tolerance = 1e-8;
  double damping = 0.5;
  std::size_t max_sweeps = 10000;
};

/// Symmetric increasing equilibrium bidding function of the non-credible
/// second-price auction against a gamma-averse seller.
///
/// The equilibrium satisfies, with G = F^{n-1} and a(theta) = max{lower,
/// b^{-1}(b(theta) - gamma)},
///
///   b(theta) [G(theta) - G(a(theta))] + int_lower^{a(theta)} (b(xi) + gamma) dG(xi)
///       = int_lower^theta xi dG(xi),
///
/// i.e. expected payment equals the first-price expected payment. This is the
/// integrated form of the bidder's first-order condition
///
///   (n-1) f F^{n-2} (theta - b) - b'(theta) [G(theta) - G(a(theta))] = 0.
///
/// The solver starts from the FP tabulation and performs damped Gauss-Seidel
/// sweeps; at each grid point the (monotone in the bid) equation above is
/// solved by bisection with the current iterate used for b^{-1}, and the table
/// is projected onto monotone, undominated bids. Iteration stops when the
/// sup-norm fixed-point residual falls below `tolerance`.
///
/// Throws SolverError (carrying the last residual) after `max_sweeps` sweeps.
BidFunction solve_ncsp_equilibrium(const ValueDistribution& F, int n, double gamma,
                                   const NcspSolverOptions& options = {});

/// Sup-norm residual of the integrated first-order condition for `bidfn`,
/// recomputed from scratch: max_i |b_i - y_i| where y_i solves the grid
/// equation at point i with all other table entries held fixed.
double ncsp_fixed_point_residual(const BidFunction& bidfn, const ValueDistribution& F, int n,
                                 double gamma);

struct NestingReport {
  bool holds = true;
  /// Largest violation of fp(theta) <= b(theta) or b(theta) < theta.
  double worst_violation = 0.0;
  std::size_t checked_points = 0;
};

/// Checks fp_bid(theta) <= b(theta) < theta at every interior grid point.
/// `slack` absorbs solver round-off on the lower bound.
NestingReport check_nesting(const BidFunction& bidfn, const ValueDistribution& F, int n,
                            double slack = 1e-9);

enum class PricingKind { kFirstPrice, kSecondPrice, kOvercharge };

struct PricingRule {
  PricingKind kind = PricingKind::kFirstPrice;
  double gamma = 0.0;  // used by kOvercharge only

  static PricingRule first_price() { return {PricingKind::kFirstPrice, 0.0}; }
  static PricingRule second_price() { return {PricingKind::kSecondPrice, 0.0}; }
  static PricingRule overcharge(double gamma) { return {PricingKind::kOvercharge, gamma}; }
};

/// Seller's expected price when n bidders with i.i.d. values from F all bid
/// according to `bidfn`, by composite Gauss-Legendre quadrature over the joint
/// law of the two highest values. Throws DomainError for non-monotone bidfn.
double expected_revenue(const BidFunction& bidfn, const ValueDistribution& F, int n,
                        const PricingRule& rule);

}  // namespace auctionlab
