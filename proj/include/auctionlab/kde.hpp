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

#include <span>
#include <vector>

namespace auctionlab {

/// Gaussian kernel density estimate of a univariate sample.
class GaussianKde {
 public:
  /// Throws DomainError on an empty sample or a non-positive bandwidth.
  GaussianKde(std::vector<double> sample, double bandwidth);

  double bandwidth() const noexcept { return bandwidth_; }
  std::size_t size() const noexcept { return sample_.size(); }

  /// Mixture of normal densities centred on the sample points.
  double pdf(double x) const;
  /// Mixture of normal cdfs, the exact integral of pdf.
  double cdf(double x) const;

 private:
  std::vector<double> sample_;
  double bandwidth_;
};

/// 1.06 * sd * m^(-1/5) with the (m-1)-normalized standard deviation.
/// Returns `fallback` when the sample has no spread.
double silverman_bandwidth(std::span<const double> sample, double fallback = 1.0);

}  // namespace auctionlab
