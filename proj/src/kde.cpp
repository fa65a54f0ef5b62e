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

#include "auctionlab/kde.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "auctionlab/errors.hpp"

namespace auctionlab {

GaussianKde::GaussianKde(std::vector<double> sample, double bandwidth)
    : sample_(std::move(sample)), bandwidth_(bandwidth) {
  if (sample_.empty()) throw DomainError("kernel density needs a non-empty sample");
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_))
    throw DomainError("kernel bandwidth must be positive and finite");
}

double GaussianKde::pdf(double x) const {
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth_);
  double sum = 0.0;
  for (double s : sample_) {
    const double z = (x - s) / bandwidth_;
    sum += std::exp(-0.5 * z * z);
  }
  return norm * sum / static_cast<double>(sample_.size());
}

double GaussianKde::cdf(double x) const {
  double sum = 0.0;
  for (double s : sample_) sum += 0.5 * std::erfc(-(x - s) / (bandwidth_ * std::numbers::sqrt2));
  return sum / static_cast<double>(sample_.size());
}

double silverman_bandwidth(std::span<const double> sample, double fallback) {
  const std::size_t m = sample.size();
  if (m < 2) return fallback;
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(m);
  double ss = 0.0;
  for (double x : sample) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (!(sd > 0.0)) return fallback;
  return 1.06 * sd * std::pow(static_cast<double>(m), -0.2);
}

}  // namespace auctionlab
