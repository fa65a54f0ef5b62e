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

#include "auctionlab/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "auctionlab/errors.hpp"

namespace auctionlab {

namespace {

// 5-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 5> kGLNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGLWeights = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

template <typename Fn>
double gauss_legendre(double a, double b, Fn&& fn) {
  if (b <= a) return 0.0;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t q = 0; q < kGLNodes.size(); ++q) sum += kGLWeights[q] * fn(mid + half * kGLNodes[q]);
  return half * sum;
}

double clamp_to(const ValueDistribution& F, double x) {
  return std::clamp(x, static_cast<double>(F.lower()), static_cast<double>(F.upper()));
}

// Law of the highest of n-1 rival values: G = F^{n-1}, g = G'.
struct RivalLaw {
  const ValueDistribution& F;
  int n;

  double G(double x) const { return std::pow(F.cdf(clamp_to(F, x)), n - 1); }
  double g(double x) const {
    x = clamp_to(F, x);
    return (n - 1) * F.pdf(x) * std::pow(F.cdf(x), n - 2);
  }
};

void require_bidders(int n) {
  if (n < 2) throw DomainError("at least two bidders are required (n=" + std::to_string(n) + ")");
}

// The grid equation of the NCSP equilibrium at one grid point, for a table
// whose entries below the point are held fixed.
class GridEquation {
 public:
  GridEquation(const std::vector<double>& grid, const RivalLaw& law, double gamma)
      : grid_(grid), law_(law), gamma_(gamma), G_(grid.size()), target_(grid.size(), 0.0) {
    for (std::size_t i = 0; i < grid.size(); ++i) G_[i] = law.G(grid[i]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      target_[i] = target_[i - 1] +
                   gauss_legendre(grid[i - 1], grid[i], [&](double x) { return x * law.g(x); });
    }
    G_lower_ = G_[0];
  }

  // Integral of (piecewise linear b) * g over segment [k, k+1] restricted to [grid[k], upto].
  double segment_integral(std::size_t k, double b0, double b1, double upto) const {
    const double x0 = grid_[k];
    const double h = grid_[k + 1] - x0;
    return gauss_legendre(x0, upto, [&](double x) {
      const double t = (x - x0) / h;
      return (b0 + (b1 - b0) * t) * law_.g(x);
    });
  }

  // phi_i(y) for table `b` (entries < i fixed, entry i replaced by y) and
  // prefix[k] = int_lower^{grid[k]} b g for k < i.
  double phi(std::size_t i, double y, const std::vector<double>& b,
             const std::vector<double>& prefix) const {
    const double z = y - gamma_;
    double a = grid_[0];
    double integral = 0.0;
    if (z > b[0]) {
      // Last index k < i with b[k] < z; b[k+1] >= z (b[i] := y > z).
      auto first = b.begin();
      auto last = b.begin() + static_cast<std::ptrdiff_t>(i);
      const auto it = std::lower_bound(first, last, z);
      const std::size_t k = static_cast<std::size_t>(it - first) - 1;
      const double bk = b[k];
      const double bk1 = (k + 1 == i) ? y : b[k + 1];
      const double frac = bk1 > bk ? (z - bk) / (bk1 - bk) : 1.0;
      a = grid_[k] + frac * (grid_[k + 1] - grid_[k]);
      integral = prefix[k] + segment_integral(k, bk, bk1, a);
      integral += gamma_ * (law_.G(a) - G_lower_);
    }
    return y * (G_[i] - law_.G(a)) + integral - target_[i];
  }

  // Root of phi_i on [lo, hi]; phi is non-decreasing in y.
  double solve(std::size_t i, double lo, double hi, const std::vector<double>& b,
               const std::vector<double>& prefix) const {
    if (phi(i, lo, b, prefix) >= 0.0) return lo;
    if (phi(i, hi, b, prefix) <= 0.0) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (phi(i, mid, b, prefix) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

 private:
  const std::vector<double>& grid_;
  const RivalLaw& law_;
  double gamma_;
  std::vector<double> G_;
  std::vector<double> target_;
  double G_lower_ = 0.0;
};

}  // namespace

void SellerParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    std::ostringstream os;
    os << "seller gamma must be positive and finite (got " << gamma << ")";
    throw DomainError(os.str());
  }
}

BidFunction::BidFunction(std::vector<double> grid, std::vector<double> bids, Treatment treatment,
                         double gamma)
    : grid_(std::move(grid)), bids_(std::move(bids)), treatment_(treatment), gamma_(gamma) {
  if (grid_.size() != bids_.size() || grid_.size() < 2)
    throw DomainError("bid function needs matching grid and bid tables of size >= 2");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) throw DomainError("bid function grid must be ascending");
  }
}

void BidFunction::set_solver_info(double residual, std::size_t sweeps, double tolerance) {
  residual_ = residual;
  sweeps_ = sweeps;
  tolerance_ = tolerance;
}

double BidFunction::operator()(double theta) const {
  if (theta <= grid_.front()) return bids_.front();
  if (theta >= grid_.back()) return bids_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), theta);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double t = (theta - grid_[k]) / (grid_[k + 1] - grid_[k]);
  return bids_[k] + t * (bids_[k + 1] - bids_[k]);
}

double BidFunction::inverse(double bid) const {
  if (bid <= bids_.front()) return grid_.front();
  if (bid >= bids_.back()) return grid_.back();
  const auto it = std::lower_bound(bids_.begin(), bids_.end(), bid);
  const std::size_t k1 = static_cast<std::size_t>(it - bids_.begin());
  const std::size_t k = k1 - 1;
  const double span = bids_[k1] - bids_[k];
  const double t = span > 0.0 ? (bid - bids_[k]) / span : 1.0;
  return grid_[k] + t * (grid_[k1] - grid_[k]);
}

bool BidFunction::is_increasing() const {
  for (std::size_t i = 1; i < bids_.size(); ++i) {
    if (bids_[i] < bids_[i - 1] - 1e-12) return false;
  }
  return bids_.back() > bids_.front();
}

double fp_bid(double theta, const ValueDistribution& F, int n) {
  require_bidders(n);
  F.cdf(theta);  // range check
  const double lower = F.lower();
  return lower + (static_cast<double>(n - 1) / n) * (theta - lower);
}

double csp_bid(double theta) { return theta; }

std::vector<double> value_grid(const ValueDistribution& F, std::size_t grid_size) {
  if (grid_size < 2) throw DomainError("grid needs at least two points");
  std::vector<double> grid(grid_size);
  const double h = F.width() / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) grid[i] = F.lower() + h * static_cast<double>(i);
  grid.back() = F.upper();
  return grid;
}

BidFunction tabulate_fp(const ValueDistribution& F, int n, std::size_t grid_size) {
  require_bidders(n);
  auto grid = value_grid(F, grid_size);
  std::vector<double> bids(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) bids[i] = fp_bid(grid[i], F, n);
  return BidFunction(std::move(grid), std::move(bids), Treatment::kFP);
}

BidFunction tabulate_csp(const ValueDistribution& F, std::size_t grid_size) {
  auto grid = value_grid(F, grid_size);
  std::vector<double> bids(grid.begin(), grid.end());
  return BidFunction(std::move(grid), std::move(bids), Treatment::kCSP);
}

SellerDecision seller_best_response(std::span<const double> bids, const SellerParams& seller) {
  if (bids.size() < 2) throw DomainError("seller best response needs at least two bids");
  seller.validate();
  std::size_t top = 0;
  for (std::size_t i = 1; i < bids.size(); ++i) {
    if (bids[i] > bids[top]) top = i;
  }
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (i != top) second = std::max(second, bids[i]);
  }
  return {top, std::min(bids[top], second + seller.gamma)};
}

BidFunction solve_ncsp_equilibrium(const ValueDistribution& F, int n, double gamma,
                                   const NcspSolverOptions& options) {
  require_bidders(n);
  SellerParams{gamma}.validate();
  if (options.grid_size < 101) throw DomainError("NCSP solver needs grid_size >= 101");
  if (!(options.tolerance > 0.0)) throw DomainError("NCSP solver needs tol > 0");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw DomainError("NCSP solver damping must lie in (0, 1]");

  const BidFunction start = tabulate_fp(F, n, options.grid_size);
  const std::vector<double>& grid = start.grid();
  std::vector<double> b = start.bids();
  const RivalLaw law{F, n};
  const GridEquation eq(grid, law, gamma);
  std::vector<double> prefix(grid.size(), 0.0);

  double step = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    step = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double lo = b[i - 1];
      const double hi = grid[i];
      const double y = eq.solve(i, lo, hi, b, prefix);
      step = std::max(step, std::abs(y - b[i]));
      const double damped = (1.0 - options.damping) * b[i] + options.damping * y;
      b[i] = std::clamp(damped, lo, hi);
      prefix[i] = prefix[i - 1] + eq.segment_integral(i - 1, b[i - 1], b[i], grid[i]);
    }
    if (step < options.tolerance) {
      BidFunction out(grid, b, Treatment::kNCSP, gamma);
      const double residual = ncsp_fixed_point_residual(out, F, n, gamma);
      if (residual < options.tolerance) {
        out.set_solver_info(residual, sweep, options.tolerance);
        return out;
      }
    }
  }
  std::ostringstream os;
  os << "NCSP equilibrium solver did not converge in " << options.max_sweeps
     << " sweeps (last residual " << step << ")";
  throw SolverError(os.str(), step);
}

double ncsp_fixed_point_residual(const BidFunction& bidfn, const ValueDistribution& F, int n,
                                 double gamma) {
  require_bidders(n);
  const auto& grid = bidfn.grid();
  const auto& b = bidfn.bids();
  const RivalLaw law{F, n};
  const GridEquation eq(grid, law, gamma);
  std::vector<double> prefix(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i)
    prefix[i] = prefix[i - 1] + eq.segment_integral(i - 1, b[i - 1], b[i], grid[i]);
  double worst = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double y = eq.solve(i, b[i - 1], grid[i], b, prefix);
    worst = std::max(worst, std::abs(y - b[i]));
  }
  return worst;
}

NestingReport check_nesting(const BidFunction& bidfn, const ValueDistribution& F, int n,
                            double slack) {
  NestingReport report;
  const auto& grid = bidfn.grid();
  const auto& b = bidfn.bids();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double theta = grid[i];
    if (theta <= F.lower() || theta >= F.upper()) continue;
    ++report.checked_points;
    const double lower_gap = fp_bid(theta, F, n) - b[i];  // must be <= slack
    if (lower_gap > slack) {
      report.holds = false;
      report.worst_violation = std::max(report.worst_violation, lower_gap);
    }
    const double upper_gap = b[i] - theta;  // must be < 0
    if (upper_gap >= 0.0) {
      report.holds = false;
      report.worst_violation = std::max(report.worst_violation, upper_gap);
    }
  }
  return report;
}

double expected_revenue(const BidFunction& bidfn, const ValueDistribution& F, int n,
                        const PricingRule& rule) {
  require_bidders(n);
  if (!bidfn.is_increasing()) throw DomainError("expected_revenue needs an increasing bid function");
  if (rule.kind == PricingKind::kOvercharge) SellerParams{rule.gamma}.validate();

  const double lower = F.lower();
  const double upper = F.upper();
  // Joint density of (highest, second-highest) value: n(n-1) f(x1) f(x2) F^{n-2}(x2).
  auto second_density = [&](double x2) { return std::pow(F.cdf(x2), n - 2) * F.pdf(x2); };

  auto inner = [&](double x1) {
    const double top_bid = bidfn(x1);
    auto price = [&](double x2) {
      const double low_bid = bidfn(x2);
      switch (rule.kind) {
        case PricingKind::kFirstPrice: return top_bid;
        case PricingKind::kSecondPrice: return low_bid;
        case PricingKind::kOvercharge: return std::min(top_bid, low_bid + rule.gamma);
      }
      return top_bid;
    };
    // Split at the kink of the overcharge price and at grid nodes so each
    // Gauss-Legendre panel sees a smooth integrand.
    std::vector<double> cuts;
    cuts.push_back(lower);
    for (double g : bidfn.grid()) {
      if (g > lower && g < x1) cuts.push_back(g);
    }
    if (rule.kind == PricingKind::kOvercharge) {
      const double kink = bidfn.inverse(top_bid - rule.gamma);
      if (kink > lower && kink < x1) cuts.push_back(kink);
    }
    cuts.push_back(x1);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t c = 1; c < cuts.size(); ++c) {
      sum += gauss_legendre(cuts[c - 1], cuts[c],
                            [&](double x2) { return price(x2) * second_density(x2); });
    }
    return sum;
  };

  // Outer integral over the highest value, panel edges at grid nodes.
  const auto& grid = bidfn.grid();
  std::vector<double> edges;
  edges.push_back(lower);
  for (double g : grid) {
    if (g > lower && g < upper) edges.push_back(g);
  }
  edges.push_back(upper);
  const std::size_t stride = std::max<std::size_t>(1, edges.size() / 400);
  std::vector<double> panels;
  for (std::size_t e = 0; e < edges.size(); e += stride) panels.push_back(edges[e]);
  if (panels.back() != upper) panels.push_back(upper);

  double total = 0.0;
  for (std::size_t p = 1; p < panels.size(); ++p) {
    total += gauss_legendre(panels[p - 1], panels[p],
                            [&](double x1) { return inner(x1) * F.pdf(x1); });
  }
  return static_cast<double>(n) * (n - 1) * total;
}

}  // namespace auctionlab
