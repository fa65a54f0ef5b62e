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

#include "auctionlab/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "auctionlab/csv_io.hpp"
#include "auctionlab/errors.hpp"
#include "auctionlab/estimate.hpp"
#include "auctionlab/kde.hpp"
#include "auctionlab/parallel.hpp"

namespace auctionlab {

std::string_view to_string(BeliefModel b) noexcept {
  return b == BeliefModel::kPopulation ? "population" : "equilibrium";
}

BeliefModel parse_belief(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "equilibrium") return BeliefModel::kEquilibrium;
  if (lower == "population") return BeliefModel::kPopulation;
  throw InputError("unknown belief model '" + std::string(s) + "' (expected equilibrium or population)");
}

namespace {

struct SubjectPanel {
  SubjectKey key;
  SubjectData data;
};

double own_slope(const SubjectData& s) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i : s.usable()) {
    num += s[i].theta * s[i].bid;
    den += s[i].theta * s[i].theta;
  }
  return num > 0.0 && den > 0.0 ? num / den : 1.0;
}

std::shared_ptr<const GaussianKde> make_kde(std::vector<double> sample) {
  if (sample.empty()) throw InputError("population belief needs bids from other subjects");
  const double h = silverman_bandwidth(sample);
  return std::make_shared<const GaussianKde>(std::move(sample), h);
}

class GroupTester {
 public:
  GroupTester(Treatment t, const RpOptions& opts, double gamma) : t_(t), opts_(opts), gamma_(gamma) {}

  ConstraintBuilder builder(const WinBelief& belief, double slope) const {
    if (t_ == Treatment::kFP) {
      const FpTestOptions fp{opts_.supergradient, slope};
      return [belief, fp](const std::vector<Observation>& obs) { return build_fp_constraints(obs, belief, fp); };
    }
    const NcspTestOptions nc{opts_.ncsp_signs};
    const double g = gamma_;
    return [belief, nc, g](const std::vector<Observation>& obs) {
      return build_ncsp_constraints(obs, belief, g, nc);
    };
  }

  WinBelief belief(std::shared_ptr<const GaussianKde> kde) const {
    if (opts_.belief == BeliefModel::kPopulation) return WinBelief::population(std::move(kde), 2);
    return WinBelief::equilibrium(opts_.values, 2);
  }

 private:
  Treatment t_;
  const RpOptions& opts_;
  double gamma_;
};

std::string percent(std::size_t x, std::size_t n) {
  return format_fixed(100.0 * static_cast<double>(x) / static_cast<double>(n), 1) + "%";
}

std::string threshold_text(double t) {
  return std::isinf(t) ? std::string("none") : format_fixed(t, 2);
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

RpReport run_rp_test(const Dataset& d, const RpOptions& opts) {
  std::vector<Treatment> treatments = opts.treatments;
  const bool explicit_selection = !treatments.empty();
  if (!explicit_selection) treatments = {Treatment::kFP, Treatment::kNCSP};
  for (Treatment t : treatments) {
    if (t == Treatment::kCSP) throw InputError("no revealed-preference test is defined for csp");
  }
  if (!(opts.power_p > 0.0 && opts.power_p <= 1.0)) throw InputError("--power must lie in (0, 1]");
  if (opts.power_subjects == 0) throw InputError("--power-subjects must be positive");

  std::map<Treatment, std::vector<SubjectPanel>> panels;
  std::map<Treatment, std::vector<std::pair<SubjectKey, double>>> pooled;
  for (const auto& [key, recs] : group_by_subject(d.bids)) {
    std::map<Treatment, std::vector<Observation>> by_t;
    for (const auto& r : recs) {
      by_t[r.treatment].push_back({r.round, static_cast<double>(r.value), r.bid});
      pooled[r.treatment].emplace_back(key, r.bid);
    }
    for (auto& [t, obs] : by_t) {
      if (std::find(treatments.begin(), treatments.end(), t) == treatments.end()) continue;
      if (obs.size() > kMaxHmiObservations)
        throw SizeError("subject " + to_string(key) + " has " + std::to_string(obs.size()) +
                        " observations; exhaustive HMI supports at most " + std::to_string(kMaxHmiObservations));
      if (opts.learning && obs.size() > kMaxLearningObservations)
        throw SizeError("subject " + to_string(key) + " has " + std::to_string(obs.size()) +
                        " observations; the learning-weighted HMI supports at most " +
                        std::to_string(kMaxLearningObservations));
      panels[t].push_back({key, SubjectData(to_string(key), std::move(obs))});
    }
  }
  std::vector<Treatment> active;
  for (Treatment t : treatments) {
    if (panels.count(t) != 0) {
      active.push_back(t);
    } else if (explicit_selection) {
      throw InputError("the data contain no " + std::string(to_string(t)) + " bidders");
    }
  }
  if (active.empty()) throw InputError("the data contain no fp or ncsp bidders");

  RpReport report;
  report.belief = opts.belief;
  report.power_p = opts.power_p;
  double gamma = 0.0;
  if (std::find(active.begin(), active.end(), Treatment::kNCSP) != active.end()) {
    if (opts.gamma) {
      gamma = *opts.gamma;
      if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be positive");
    } else {
      if (!d.has_rounds()) throw InputError("--gamma auto requires round-level NCSP data");
      const auto sample = censored_sample(d);
      gamma = estimate_gamma(sample).gamma;
      if (!(gamma > 0.0)) throw IdentificationError("estimated gamma is not positive");
      report.gamma_estimated = true;
    }
    report.gamma = gamma;
  }

  for (std::size_t gi = 0; gi < active.size(); ++gi) {
    const Treatment t = active[gi];
    const auto& subjects = panels[t];
    const GroupTester tester(t, opts, gamma);
    const auto& pool = pooled[t];

    std::vector<RpSubjectRow> rows(subjects.size());
    parallel_for(subjects.size(), [&](std::size_t i) {
      const auto& s = subjects[i];
      std::shared_ptr<const GaussianKde> kde;
      if (opts.belief == BeliefModel::kPopulation) {
        std::vector<double> others;
        for (const auto& [key, bid] : pool) {
          if (key != s.key) others.push_back(bid);
        }
        kde = make_kde(std::move(others));
      }
      const auto build = tester.builder(tester.belief(kde), own_slope(s.data));
      rows[i].subject_id = s.data.id();
      rows[i].treatment = t;
      rows[i].result = hmi(s.data, build);
      if (opts.learning) rows[i].learning = hmi_learning(s.data, build);
    });

    std::size_t rounds = 0;
    for (const auto& s : subjects) rounds = std::max(rounds, s.data.size());
    std::shared_ptr<const GaussianKde> pooled_kde;
    if (opts.belief == BeliefModel::kPopulation) {
      std::vector<double> all;
      for (const auto& [key, bid] : pool) all.push_back(bid);
      pooled_kde = make_kde(std::move(all));
    }
    const WinBelief random_belief = tester.belief(pooled_kde);
    const auto scorer = [&](const SubjectData& s) {
      return hmi(s, tester.builder(random_belief, own_slope(s))).hmi;
    };
    RpGroup group;
    group.treatment = t;
    group.rounds_per_subject = rounds;
    group.calibration =
        bronars_power(opts.power_subjects, rounds, scorer, mix64(opts.seed + gi + 1), opts.values);
    if (std::none_of(group.calibration.levels.begin(), group.calibration.levels.end(),
                     [&](const PowerLevel& l) { return std::abs(l.p - opts.power_p) < 1e-12; })) {
      group.calibration.levels.push_back(
          {opts.power_p, power_threshold(group.calibration.random_hmi, opts.power_p)});
    }

    std::vector<double> hmis;
    for (const auto& r : rows) hmis.push_back(r.result.hmi);
    group.rates = pass_rate_report(hmis, group.calibration);
    const double t10 = group.calibration.threshold(0.10);
    const double t05 = group.calibration.threshold(0.05);
    std::size_t learning_exact = 0;
    for (auto& r : rows) {
      r.pass_exact = r.result.hmi >= 1.0;
      r.pass_p10 = r.result.hmi >= t10;
      r.pass_p05 = r.result.hmi >= t05;
      if (r.learning && r.learning->hmi >= 1.0) ++learning_exact;
    }
    if (opts.learning) group.learning_exact = learning_exact;
    report.groups.push_back(std::move(group));
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }

  if (report.groups.size() == 2) {
    const auto& a = report.groups[0].rates;
    const auto& b = report.groups[1].rates;
    report.fp_vs_ncsp_p_value = two_proportion_p_value(a.exact, a.n_subjects, b.exact, b.n_subjects);
  }
  return report;
}

std::string RpReport::csv() const {
  std::string out = "subject_id,treatment,hmi,hmi_learning,pass_exact,pass_p10,pass_p05\n";
  for (const auto& r : rows) {
    out += r.subject_id + ',' + std::string(to_string(r.treatment)) + ',' + format_number(r.result.hmi) + ',';
    if (r.learning) out += format_number(r.learning->hmi);
    out += ',' + std::to_string(r.pass_exact ? 1 : 0) + ',' + std::to_string(r.pass_p10 ? 1 : 0) + ',' +
           std::to_string(r.pass_p05 ? 1 : 0) + '\n';
  }
  return out;
}

std::string RpReport::summary() const {
  constexpr std::size_t kLabel = 30;
  constexpr std::size_t kCol = 12;
  std::string out = "Revealed-preference test (belief: " + std::string(to_string(belief)) + ")\n";
  auto line = [&](const std::string& label, auto&& cell) {
    out += pad(label, kLabel);
    for (const auto& g : groups) out += pad(cell(g), kCol);
    out += '\n';
  };
  line("", [](const RpGroup& g) {
    std::string name(to_string(g.treatment));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
    return name;
  });
  line("Subjects", [](const RpGroup& g) { return std::to_string(g.rates.n_subjects); });
  line("Rounds per subject", [](const RpGroup& g) { return std::to_string(g.rounds_per_subject); });
  line("Exact pass rate", [](const RpGroup& g) { return percent(g.rates.exact, g.rates.n_subjects); });
  line("Pass rate, power p=0.10", [](const RpGroup& g) { return percent(g.rates.pass_p10, g.rates.n_subjects); });
  line("Pass rate, power p=0.05", [](const RpGroup& g) { return percent(g.rates.pass_p05, g.rates.n_subjects); });
  line("HMI threshold p=0.10", [](const RpGroup& g) { return threshold_text(g.calibration.threshold(0.10)); });
  line("HMI threshold p=0.05", [](const RpGroup& g) { return threshold_text(g.calibration.threshold(0.05)); });
  if (std::abs(power_p - 0.10) > 1e-12 && std::abs(power_p - 0.05) > 1e-12) {
    const std::string tag = "p=" + format_fixed(power_p, 2);
    const double p = power_p;
    line("HMI threshold " + tag, [p](const RpGroup& g) { return threshold_text(g.calibration.threshold(p)); });
    line("Pass rate, power " + tag, [&, p](const RpGroup& g) {
      const double t = g.calibration.threshold(p);
      std::size_t n = 0;
      for (const auto& r : rows) {
        if (r.treatment == g.treatment && r.result.hmi >= t) ++n;
      }
      return percent(n, g.rates.n_subjects);
    });
  }
  if (std::any_of(groups.begin(), groups.end(), [](const RpGroup& g) { return g.learning_exact.has_value(); })) {
    line("Exact pass rate, learning", [](const RpGroup& g) {
      return g.learning_exact ? percent(*g.learning_exact, g.rates.n_subjects) : std::string("-");
    });
  }
  if (gamma) {
    out += "gamma: " + format_fixed(*gamma, 2) + (gamma_estimated ? " (tobit estimate)" : " (given)") + "\n";
  }
  if (fp_vs_ncsp_p_value) {
    out += "FP vs NCSP exact pass rate, two-proportion p-value: " + format_fixed(*fp_vs_ncsp_p_value, 4) + "\n";
  }
  if (std::any_of(groups.begin(), groups.end(), [](const RpGroup& g) { return g.treatment == Treatment::kNCSP; })) {
    out += "NCSP conditions are necessary only: a pass means not rejected.\n";
  }
  return out;
}

}  // namespace auctionlab
