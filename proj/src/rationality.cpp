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

#include "auctionlab/rationality.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "auctionlab/errors.hpp"
#include "auctionlab/parallel.hpp"

namespace auctionlab {

SubjectData::SubjectData(std::string id, std::vector<Observation> observations)
    : id_(std::move(id)), obs_(std::move(observations)) {
  if (obs_.size() > 64) throw SizeError("subject " + id_ + " has more than 64 observations");
  status_.reserve(obs_.size());
  for (const auto& o : obs_) {
    if (!std::isfinite(o.theta) || !std::isfinite(o.bid) || o.theta < 0.0 || o.bid < 0.0)
      throw DomainError("subject " + id_ + ": observation out of range");
    if (o.bid > o.theta) {
      status_.push_back(ObservationStatus::kDominated);
    } else if (o.theta == 0.0) {
      status_.push_back(ObservationStatus::kVacuous);
    } else if (o.bid == o.theta) {
      status_.push_back(ObservationStatus::kZeroSurplus);
    } else {
      status_.push_back(ObservationStatus::kUsable);
    }
  }
}

std::vector<SubjectData> SubjectData::from_records(const std::vector<BidRecord>& bids) {
  std::vector<SubjectData> out;
  for (const auto& [key, records] : group_by_subject(bids)) {
    std::vector<Observation> obs;
    obs.reserve(records.size());
    for (const auto& r : records) obs.push_back({r.round, static_cast<double>(r.value), r.bid});
    out.emplace_back(to_string(key), std::move(obs));
  }
  return out;
}

std::vector<std::size_t> SubjectData::usable() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < status_.size(); ++i) {
    if (status_[i] == ObservationStatus::kUsable) idx.push_back(i);
  }
  return idx;
}

std::size_t SubjectData::forced_drops() const {
  return static_cast<std::size_t>(std::count_if(status_.begin(), status_.end(), [](ObservationStatus st) {
    return st == ObservationStatus::kZeroSurplus || st == ObservationStatus::kDominated;
  }));
}

WinBelief WinBelief::equilibrium(ValueDistribution F, int n_bidders) {
  if (n_bidders < 2) throw DomainError("at least two bidders are required");
  WinBelief b;
  b.F_ = F;
  b.n_ = n_bidders;
  return b;
}

WinBelief WinBelief::population(std::shared_ptr<const GaussianKde> opponent_bids, int n_bidders) {
  if (n_bidders < 2) throw DomainError("at least two bidders are required");
  if (!opponent_bids) throw DomainError("population belief needs an opponent bid estimate");
  WinBelief b;
  b.n_ = n_bidders;
  b.kde_ = std::move(opponent_bids);
  return b;
}

double WinBelief::log_slope(double theta, double bid) const {
  if (kde_) {
    const double H = kde_->cdf(bid);
    if (!(H > 0.0)) throw DegenerateObservationError("estimated win probability is zero at the bid");
    return (n_ - 1) * kde_->pdf(bid) / H;
  }
  const double F = F_.cdf(theta);
  if (!(F > 0.0)) throw DegenerateObservationError("value at the lower end of the support");
  return (n_ - 1) * F_.pdf(theta) / F;
}

double WinBelief::log_win(double theta, double bid) const {
  const double P = kde_ ? kde_->cdf(bid) : F_.cdf(theta);
  if (!(P > 0.0)) throw DegenerateObservationError("win probability is zero at the observation");
  return (n_ - 1) * std::log(P);
}

LPSystem build_fp_constraints(const std::vector<Observation>& obs, const WinBelief& belief,
                              const FpTestOptions& opts) {
  if (opts.supergradient == Supergradient::kCorrected && !(opts.bid_slope > 0.0))
    throw DomainError("corrected supergradient needs a positive bid slope");
  const std::size_t m = obs.size();
  LPSystem lp;
  std::vector<double> slope(m);
  std::vector<double> surplus(m);
  for (std::size_t j = 0; j < m; ++j) {
    lp.add_variable("nu^" + std::to_string(j + 1), VarBound::kNonPositive);
    slope[j] = belief.log_slope(obs[j].theta, obs[j].bid);
    if (opts.supergradient == Supergradient::kCorrected) slope[j] /= opts.bid_slope;
    surplus[j] = obs[j].theta - obs[j].bid;
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      lp.add_constraint({{{k, 1.0}, {j, -1.0}},
                         Relation::kLessEqual,
                         slope[j] * (surplus[k] - surplus[j]),
                         false,
                         "concavity"});
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      if (surplus[k] == surplus[j]) {
        lp.add_constraint({{{k, 1.0}, {j, -1.0}}, Relation::kEqual, 0.0, false, "order"});
      } else if (surplus[k] < surplus[j]) {
        lp.add_constraint({{{k, 1.0}, {j, -1.0}}, Relation::kLessEqual, 0.0, true, "order"});
      } else {
        lp.add_constraint({{{j, 1.0}, {k, -1.0}}, Relation::kLessEqual, 0.0, true, "order"});
      }
    }
  }
  return lp;
}

LPSystem build_ncsp_constraints(const std::vector<Observation>& obs, const WinBelief& belief,
                                double gamma, const NcspTestOptions& opts) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive and finite");
  const std::size_t m = obs.size();
  const bool reversed = opts.signs == NcspSigns::kReversed;
  std::vector<double> log_p(m);
  for (std::size_t j = 0; j < m; ++j) log_p[j] = belief.log_win(obs[j].theta, obs[j].bid);

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  LPSystem lp;
  for (std::size_t k = 0; k < m; ++k) {
    const std::string tag = std::to_string(k + 1);
    const double bk = obs[k].bid;
    const double tk = obs[k].theta;
    std::vector<std::size_t> nu(m, kNone);
    for (std::size_t j = 0; j < m; ++j) {
      if (obs[j].bid <= tk)
        nu[j] = lp.add_variable("nu^{" + tag + "," + std::to_string(j + 1) + "}", VarBound::kNonPositive);
    }
    std::size_t nu_gamma = kNone;
    auto get_nu_gamma = [&] {
      if (nu_gamma == kNone) nu_gamma = lp.add_variable("nu^" + tag + "_gamma", VarBound::kNonPositive);
      return nu_gamma;
    };
    for (std::size_t j = 0; j < m; ++j) {
      if (nu[j] == kNone) continue;
      const double bj = obs[j].bid;
      std::size_t lambda = kNone;
      auto get_lambda = [&] {
        if (lambda == kNone)
          lambda = lp.add_variable("lambda^{" + tag + "," + std::to_string(j + 1) + "}", VarBound::kPositive);
        return lambda;
      };
      if (j != k) {
        const double c = reversed ? bk - bj : bj - bk;
        lp.add_constraint({{{nu[k], 1.0}, {nu[j], -1.0}, {get_lambda(), -c}},
                           Relation::kLessEqual, 0.0, false, "concavity-bid"});
      }
      if (gamma <= obs[j].theta) {
        const double c = reversed ? gamma - bj : bj - gamma;
        lp.add_constraint({{{get_nu_gamma(), 1.0}, {nu[j], -1.0}, {get_lambda(), -c}},
                           Relation::kLessEqual, 0.0, false, "concavity-gamma"});
      }
      if (gamma >= bk) {
        lp.add_constraint({{{nu[k], 1.0}, {nu[j], -1.0}},
                           Relation::kGreaterEqual, log_p[j] - log_p[k], false, "response-fp"});
      } else {
        lp.add_constraint({{{get_nu_gamma(), 1.0}, {nu[j], -1.0}},
                           Relation::kGreaterEqual, log_p[j] - log_p[k], false, "response-ncsp"});
      }
    }
  }
  return lp;
}

bool consistent(const ConstraintBuilder& builder, const std::vector<Observation>& obs, double strict_eps) {
  if (obs.empty()) return true;
  return check_feasible(builder(obs), strict_eps);
}

namespace {

std::vector<Observation> pick(const SubjectData& s, const std::vector<std::size_t>& idx) {
  std::vector<Observation> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(s[i]);
  return out;
}

std::vector<std::size_t> vacuous_indices(const SubjectData& s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.status(i) == ObservationStatus::kVacuous) idx.push_back(i);
  }
  return idx;
}

HMIResult finish(const SubjectData& s, std::vector<std::size_t> kept) {
  std::sort(kept.begin(), kept.end());
  HMIResult r;
  r.max_consistent_size = kept.size();
  r.hmi = s.size() == 0 ? 1.0 : static_cast<double>(kept.size()) / static_cast<double>(s.size());
  r.kept = std::move(kept);
  return r;
}

}  // namespace

HMIResult hmi(const SubjectData& s, const ConstraintBuilder& builder, double strict_eps) {
  if (s.size() > kMaxHmiObservations)
    throw SizeError("subject " + s.id() + " has " + std::to_string(s.size()) +
                    " observations; exhaustive HMI supports at most " +
                    std::to_string(kMaxHmiObservations));
  const auto usable = s.usable();
  const std::size_t m = usable.size();
  auto subset_obs = [&](std::uint32_t mask) {
    std::vector<std::size_t> idx;
    for (std::size_t b = 0; b < m; ++b) {
      if (mask >> b & 1U) idx.push_back(usable[b]);
    }
    return idx;
  };

  // Subsets containing an inconsistent singleton or pair cannot be consistent.
  std::uint32_t bad_single = 0;
  for (std::size_t a = 0; a < m; ++a) {
    if (!consistent(builder, pick(s, {usable[a]}), strict_eps)) bad_single |= 1U << a;
  }
  std::vector<std::uint32_t> conflicts(m, 0);
  for (std::size_t a = 0; a < m; ++a) {
    if (bad_single >> a & 1U) continue;
    for (std::size_t b = a + 1; b < m; ++b) {
      if (bad_single >> b & 1U) continue;
      if (!consistent(builder, pick(s, {usable[a], usable[b]}), strict_eps)) {
        conflicts[a] |= 1U << b;
        conflicts[b] |= 1U << a;
      }
    }
  }
  auto pruned = [&](std::uint32_t mask) {
    if (mask & bad_single) return true;
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
      if (conflicts[static_cast<std::size_t>(std::countr_zero(rest))] & mask) return true;
    }
    return false;
  };

  std::vector<std::size_t> best;
  for (std::size_t size = m + 1; size-- > 0;) {
    if (size == 0) break;
    const std::uint32_t limit = 1U << m;
    bool found = false;
    for (std::uint32_t mask = (1U << size) - 1; mask < limit;) {
      if (!pruned(mask)) {
        const auto idx = subset_obs(mask);
        if (size <= 2 || consistent(builder, pick(s, idx), strict_eps)) {
          best = idx;
          found = true;
          break;
        }
      }
      const std::uint32_t low = mask & (~mask + 1U);
      const std::uint32_t ripple = mask + low;
      mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    if (found) break;
  }
  auto kept = vacuous_indices(s);
  kept.insert(kept.end(), best.begin(), best.end());
  return finish(s, std::move(kept));
}

HMIResult hmi_learning(const SubjectData& s, const ConstraintBuilder& builder, double strict_eps) {
  const std::size_t n = s.size();
  if (n > kMaxLearningObservations)
    throw SizeError("subject " + s.id() + " has " + std::to_string(n) +
                    " observations; the learning-weighted HMI supports at most " +
                    std::to_string(kMaxLearningObservations));
  std::vector<std::uint64_t> weight(n);
  std::uint64_t w = 1;
  for (std::size_t i = 0; i < n; ++i) {
    w *= n;
    weight[i] = w;
  }
  // The weights are superincreasing and consistency is inherited by subsets,
  // so keeping each observation from the last round backwards whenever
  // possible is optimal.
  std::vector<std::size_t> kept_usable;
  std::vector<std::size_t> kept;
  std::uint64_t cost = 0;
  for (std::size_t i = n; i-- > 0;) {
    switch (s.status(i)) {
      case ObservationStatus::kVacuous: kept.push_back(i); break;
      case ObservationStatus::kZeroSurplus:
      case ObservationStatus::kDominated: cost += weight[i]; break;
      case ObservationStatus::kUsable: {
        auto trial = kept_usable;
        trial.push_back(i);
        std::sort(trial.begin(), trial.end());
        if (consistent(builder, pick(s, trial), strict_eps)) {
          kept_usable = std::move(trial);
          kept.push_back(i);
        } else {
          cost += weight[i];
        }
        break;
      }
    }
  }
  auto r = finish(s, std::move(kept));
  r.weighted_cost = cost;
  return r;
}

double power_threshold(const std::vector<double>& sample, double p) {
  if (sample.empty()) throw UndefinedStatisticError("power calibration needs a non-empty sample");
  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> levels{0.0};
  for (double h : sorted) {
    if (h > levels.back()) levels.push_back(h);
  }
  const double n = static_cast<double>(sorted.size());
  for (double t : levels) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), t);
    const double share = static_cast<double>(sorted.end() - first) / n;
    if (share <= p) return t;
  }
  return std::numeric_limits<double>::infinity();
}

double PowerCalibration::threshold(double p) const {
  for (const auto& level : levels) {
    if (std::abs(level.p - p) < 1e-12) return level.threshold;
  }
  return power_threshold(random_hmi, p);
}

SubjectData random_subject(std::size_t rounds, std::mt19937_64& rng, const ValueDistribution& F,
                           const std::string& id) {
  std::vector<Observation> obs;
  obs.reserve(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const int theta = F.sample_integer(rng);
    double bid = 0.0;
    if (theta > 0) bid = std::uniform_real_distribution<double>(0.0, theta)(rng);
    obs.push_back({static_cast<int>(r + 1), static_cast<double>(theta), bid});
  }
  return SubjectData(id, std::move(obs));
}

PowerCalibration bronars_power(std::size_t n_synthetic, std::size_t rounds_per_subject,
                               const SubjectScorer& scorer, std::uint64_t seed,
                               const ValueDistribution& F) {
  if (n_synthetic == 0) throw DomainError("power calibration needs at least one synthetic subject");
  PowerCalibration cal;
  cal.random_hmi.assign(n_synthetic, 0.0);
  parallel_for(n_synthetic, [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    cal.random_hmi[i] = scorer(random_subject(rounds_per_subject, rng, F, "R" + std::to_string(i + 1)));
  });
  for (double p : {0.10, 0.05}) cal.levels.push_back({p, power_threshold(cal.random_hmi, p)});
  return cal;
}

namespace {

double share(std::size_t x, std::size_t n) { return static_cast<double>(x) / static_cast<double>(n); }

}  // namespace

double PassRates::exact_rate() const { return share(exact, n_subjects); }
double PassRates::rate_p10() const { return share(pass_p10, n_subjects); }
double PassRates::rate_p05() const { return share(pass_p05, n_subjects); }

PassRates pass_rate_report(const std::vector<double>& hmis, const PowerCalibration& calibration) {
  if (hmis.empty()) throw UndefinedStatisticError("pass rates of an empty subject set");
  const double t10 = calibration.threshold(0.10);
  const double t05 = calibration.threshold(0.05);
  PassRates r;
  r.n_subjects = hmis.size();
  for (double h : hmis) {
    if (h >= 1.0) ++r.exact;
    if (h >= t10) ++r.pass_p10;
    if (h >= t05) ++r.pass_p05;
  }
  return r;
}

double two_proportion_p_value(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw UndefinedStatisticError("two-proportion test with an empty group");
  if (x1 > n1 || x2 > n2) throw DomainError("successes exceed group size");
  const double p1 = share(x1, n1);
  const double p2 = share(x2, n2);
  const double pooled = share(x1 + x2, n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (!(se > 0.0)) return 1.0;
  const double z = (p1 - p2) / se;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace auctionlab
