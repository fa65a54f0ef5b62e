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

#include "auctionlab/estimate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "auctionlab/errors.hpp"
#include "auctionlab/simulate.hpp"

namespace auctionlab {

std::vector<CensoredObservation> censored_sample(const Dataset& d) {
  std::vector<CensoredObservation> out;
  for (const auto& r : d.rounds) {
    if (r.treatment != Treatment::kNCSP) continue;
    const double u = r.high_bid() - r.low_bid();
    if (!(u > 0.0)) continue;
    out.push_back({std::clamp(r.price - r.low_bid(), 0.0, u), u, r.session_id + "/" + r.seller_id});
  }
  return out;
}

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// ln Phi(x) and phi(x)/Phi(x), with the asymptotic tail for very negative x.
double log_norm_cdf(double x) {
  if (x > -30.0) return std::log(norm_cdf(x));
  const double x2 = x * x;
  return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

double mills(double x) {
  if (x > -30.0) return std::exp(-0.5 * x * x - kLogSqrt2Pi) / norm_cdf(x);
  const double x2 = x * x;
  return -x / (1.0 - 1.0 / x2 + 3.0 / (x2 * x2));
}

enum class Censor { kNone, kLower, kUpper };

struct TobitPoint {
  double ll = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

TobitPoint tobit_eval(const std::vector<CensoredObservation>& s, const std::vector<Censor>& kind,
                      double gamma, double tau) {
  const double sigma = std::exp(tau);
  TobitPoint p;
  for (std::size_t i = 0; i < s.size(); ++i) {
    switch (kind[i]) {
      case Censor::kNone: {
        const double z = (s[i].overcharge - gamma) / sigma;
        p.ll += -0.5 * z * z - tau - kLogSqrt2Pi;
        p.grad += Eigen::Vector2d(z / sigma, z * z - 1.0);
        p.hess(0, 0) += -1.0 / (sigma * sigma);
        p.hess(0, 1) += -2.0 * z / sigma;
        p.hess(1, 1) += -2.0 * z * z;
        break;
      }
      case Censor::kLower: {
        const double a = -gamma / sigma;
        const double lam = mills(a);
        const double dlam = -lam * (a + lam);
        p.ll += log_norm_cdf(a);
        p.grad += Eigen::Vector2d(-lam / sigma, -a * lam);
        p.hess(0, 0) += dlam / (sigma * sigma);
        p.hess(0, 1) += (a * dlam + lam) / sigma;
        p.hess(1, 1) += a * lam + a * a * dlam;
        break;
      }
      case Censor::kUpper: {
        const double c = (gamma - s[i].upper) / sigma;
        const double lam = mills(c);
        const double dlam = -lam * (c + lam);
        p.ll += log_norm_cdf(c);
        p.grad += Eigen::Vector2d(lam / sigma, -c * lam);
        p.hess(0, 0) += dlam / (sigma * sigma);
        p.hess(0, 1) += -(c * dlam + lam) / sigma;
        p.hess(1, 1) += c * lam + c * c * dlam;
        break;
      }
    }
  }
  p.hess(1, 0) = p.hess(0, 1);
  return p;
}

}  // namespace

TobitResult estimate_gamma(const std::vector<CensoredObservation>& sample) {
  TobitResult res;
  res.n_obs = sample.size();
  std::vector<Censor> kind(sample.size(), Censor::kNone);
  std::vector<double> interior;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& o = sample[i];
    if (!(o.upper > 0.0) || !std::isfinite(o.upper) || !std::isfinite(o.overcharge))
      throw DomainError("censored observation needs a positive finite gap");
    if (o.overcharge <= 0.0) {
      kind[i] = Censor::kLower;
      ++res.n_lower;
    } else if (o.overcharge >= o.upper) {
      kind[i] = Censor::kUpper;
      ++res.n_upper;
    } else {
      interior.push_back(o.overcharge);
    }
  }
  res.n_uncensored = interior.size();
  if (interior.size() < 2)
    throw IdentificationError("tobit needs at least two uncensored overcharges, found " +
                              std::to_string(interior.size()));

  const double mean = std::accumulate(interior.begin(), interior.end(), 0.0) / interior.size();
  double ss = 0.0;
  for (double v : interior) ss += (v - mean) * (v - mean);
  const auto [lo_it, hi_it] = std::minmax_element(interior.begin(), interior.end());
  const double round_off = 1e-9 * std::max(1.0, std::abs(mean));
  if (*hi_it - *lo_it <= round_off) {
    bool bounded = res.n_lower == 0;
    for (std::size_t i = 0; i < sample.size() && bounded; ++i) {
      if (kind[i] == Censor::kUpper && sample[i].upper > mean + round_off) bounded = false;
    }
    if (bounded) {
      res.gamma = mean;
      res.sigma = 0.0;
      res.loglik = std::numeric_limits<double>::infinity();
      return res;
    }
  }

  double sd = std::sqrt(ss / interior.size());
  if (!(sd > 0.0)) sd = 1.0;
  Eigen::Vector2d theta(mean, std::log(sd));
  auto cur = tobit_eval(sample, kind, theta(0), theta(1));
  constexpr int kMaxIter = 500;
  for (int it = 0; it < kMaxIter; ++it) {
    if (cur.grad.lpNorm<Eigen::Infinity>() < 1e-8) {
      res.gamma = theta(0);
      res.sigma = std::exp(theta(1));
      res.loglik = cur.ll;
      res.iterations = it;
      return res;
    }
    Eigen::Vector2d step;
    const bool concave = cur.hess(0, 0) < 0.0 && cur.hess.determinant() > 0.0;
    if (concave) {
      step = -cur.hess.ldlt().solve(cur.grad);
    } else {
      step = cur.grad / std::max(1.0, cur.grad.norm());
    }
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::Vector2d trial = theta + t * step;
      auto next = tobit_eval(sample, kind, trial(0), trial(1));
      if (std::isfinite(next.ll) && next.ll >= cur.ll - 1e-12 * std::abs(cur.ll)) {
        theta = trial;
        cur = next;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  throw SolverError("tobit likelihood maximization did not converge", cur.grad.lpNorm<Eigen::Infinity>());
}

RegressionResult ols_origin(const Design& design) {
  const std::size_t n = design.y.size();
  const std::size_t k = design.names.size();
  if (k == 0) throw InputError("regression needs at least one regressor");
  if (design.x.size() != n || design.cluster.size() != n)
    throw InputError("regression rows, responses and clusters differ in length");
  for (const auto& row : design.x) {
    if (row.size() != k) throw InputError("regression row width differs from the regressor count");
  }
  if (n <= k) throw IdentificationError("regression needs more observations than regressors");

  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) X(i, j) = design.x[i][j];
    y(i) = design.y[i];
  }
  const Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (lu.rank() < static_cast<Eigen::Index>(k)) throw IdentificationError("regression design is rank deficient");
  const Eigen::MatrixXd bread = lu.inverse();
  const Eigen::VectorXd beta = bread * (X.transpose() * y);
  const Eigen::VectorXd e = y - X * beta;

  std::map<std::string, Eigen::VectorXd> scores;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = scores.try_emplace(design.cluster[i], Eigen::VectorXd::Zero(k));
    it->second += X.row(i).transpose() * e(i);
  }
  const std::size_t g = scores.size();
  if (g < 2) throw IdentificationError("clustered standard errors need at least two clusters");
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [id, s] : scores) meat += s * s.transpose();
  const double factor = static_cast<double>(g) / static_cast<double>(g - 1) *
                        static_cast<double>(n - 1) / static_cast<double>(n - k);
  const Eigen::MatrixXd v = factor * bread * meat * bread;

  RegressionResult r;
  r.names = design.names;
  r.n_obs = n;
  r.n_clusters = g;
  for (std::size_t j = 0; j < k; ++j) {
    r.coefficients.push_back(beta(j));
    r.std_errors.push_back(std::sqrt(std::max(0.0, v(j, j))));
  }
  return r;
}

Design bid_value_design(const std::vector<BidRecord>& bids) {
  bool present[3] = {false, false, false};
  for (const auto& b : bids) {
    if (b.role == Role::kBidder) present[static_cast<int>(b.treatment)] = true;
  }
  Design d;
  std::vector<Treatment> cols;
  for (Treatment t : {Treatment::kFP, Treatment::kCSP, Treatment::kNCSP}) {
    if (!present[static_cast<int>(t)]) continue;
    cols.push_back(t);
    d.names.push_back("value:" + std::string(to_string(t)));
  }
  for (const auto& b : bids) {
    if (b.role != Role::kBidder) continue;
    std::vector<double> row(cols.size(), 0.0);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] == b.treatment) row[j] = b.value;
    }
    d.x.push_back(std::move(row));
    d.y.push_back(b.bid);
    d.cluster.push_back(to_string(b.key()));
  }
  return d;
}

BidValueCoefficient bid_value_coefficient(const std::vector<BidRecord>& records) {
  BidValueCoefficient r;
  double sum = 0.0;
  for (const auto& b : records) {
    if (b.value > 0) {
      sum += b.bid / b.value;
      ++r.used;
    } else {
      ++r.excluded_zero_value;
    }
  }
  if (r.used == 0) throw UndefinedStatisticError("bid/value coefficient needs a record with a positive value");
  r.coefficient = sum / static_cast<double>(r.used);
  return r;
}

namespace {

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
  }
  return 1.0;
}

}  // namespace

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw UndefinedStatisticError("Kolmogorov-Smirnov test with an empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  const double ne = nx * ny / (nx + ny);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

double t_test_two_sided(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2 || y.size() < 2) throw UndefinedStatisticError("t-test needs at least two values per sample");
  auto moments = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double a : v) ss += (a - m) * (a - m);
    return std::pair{m, ss / (v.size() - 1)};
  };
  const auto [mx, vx] = moments(x);
  const auto [my, vy] = moments(y);
  const double ax = vx / x.size();
  const double ay = vy / y.size();
  const double se2 = ax + ay;
  if (!(se2 > 0.0)) return mx == my ? 1.0 : 0.0;
  const double t = (mx - my) / std::sqrt(se2);
  const double df = se2 * se2 / (ax * ax / (x.size() - 1) + ay * ay / (y.size() - 1));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

std::string_view to_string(SellerType t) noexcept {
  switch (t) {
    case SellerType::kNever: return "never";
    case SellerType::kSometimes: return "sometimes";
    case SellerType::kAlways: return "always";
  }
  return "never";
}

std::size_t SellerTypeTable::count(SellerType t) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [t](const SellerRow& r) { return r.type == t; }));
}

SellerTypeTable classify_sellers(const Dataset& d) {
  struct Acc {
    std::size_t rounds = 0;
    std::vector<double> ratios;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;
  for (const auto& r : d.rounds) {
    if (r.treatment != Treatment::kNCSP) continue;
    auto& a = acc[{r.session_id, r.seller_id}];
    ++a.rounds;
    if (auto s = overcharging_ratio(r)) a.ratios.push_back(*s);
  }
  SellerTypeTable table;
  for (const auto& [key, a] : acc) {
    if (a.ratios.empty()) {
      table.excluded.push_back(key.first + "/" + key.second);
      continue;
    }
    SellerRow row;
    row.session_id = key.first;
    row.seller_id = key.second;
    row.rounds = a.rounds;
    row.defined_rounds = a.ratios.size();
    row.overcharging_rounds = static_cast<std::size_t>(
        std::count_if(a.ratios.begin(), a.ratios.end(), [](double s) { return s > 0.0; }));
    row.coefficient = std::accumulate(a.ratios.begin(), a.ratios.end(), 0.0) / a.ratios.size();
    row.type = row.overcharging_rounds == 0                   ? SellerType::kNever
               : row.overcharging_rounds == row.defined_rounds ? SellerType::kAlways
                                                               : SellerType::kSometimes;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace auctionlab
