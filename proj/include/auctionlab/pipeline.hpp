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
#include <optional>
#include <string>
#include <vector>

#include "auctionlab/core.hpp"
#include "auctionlab/rationality.hpp"

namespace auctionlab {

enum class BeliefModel { kEquilibrium, kPopulation };

std::string_view to_string(BeliefModel b) noexcept;
BeliefModel parse_belief(std::string_view s);

struct RpOptions {
  /// Treatments to test (FP and/or NCSP). Empty means both.
  std::vector<Treatment> treatments;
  BeliefModel belief = BeliefModel::kEquilibrium;
  /// NCSP tolerance; estimated by tobit from the NCSP rounds when empty.
  std::optional<double> gamma;
  bool learning = false;
  /// Extra significance level reported in the summary.
  double power_p = 0.10;
  std::size_t power_subjects = 1000;
  std::uint64_t seed = 1;
  Supergradient supergradient = Supergradient::kDirect;
  NcspSigns ncsp_signs = NcspSigns::kSupergradient;
  ValueDistribution values{0, 100};
};

struct RpSubjectRow {
  std::string subject_id;
  Treatment treatment = Treatment::kFP;
  HMIResult result;
  std::optional<HMIResult> learning;
  bool pass_exact = false;
  bool pass_p10 = false;
  bool pass_p05 = false;
};

struct RpGroup {
  Treatment treatment = Treatment::kFP;
  PassRates rates;
  PowerCalibration calibration;
  std::size_t rounds_per_subject = 0;
  /// Exact pass count of the learning-weighted test.
  std::optional<std::size_t> learning_exact;
};

struct RpReport {
  BeliefModel belief = BeliefModel::kEquilibrium;
  std::optional<double> gamma;
  bool gamma_estimated = false;
  double power_p = 0.10;
  std::vector<RpSubjectRow> rows;
  std::vector<RpGroup> groups;
  /// Exact FP vs NCSP pass-rate comparison when both were tested.
  std::optional<double> fp_vs_ncsp_p_value;

  std::string csv() const;
  std::string summary() const;
};

/// Runs the revealed-preference tests on every bidder of the selected
/// treatments. Subjects are tested concurrently. Throws InputError when a
/// treatment has no bidders or gamma must be estimated without NCSP rounds,
/// SizeError when a subject exceeds the HMI bounds.
RpReport run_rp_test(const Dataset& d, const RpOptions& opts);

}  // namespace auctionlab
