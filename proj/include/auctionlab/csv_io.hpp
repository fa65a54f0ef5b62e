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

#include <istream>
#include <string>
#include <string_view>

#include "auctionlab/core.hpp"
#include "auctionlab/equilibrium.hpp"
#include "auctionlab/estimate.hpp"

namespace auctionlab {

inline constexpr std::string_view kBidsHeader = "session_id,subject_id,role,round,treatment,value,bid";
inline constexpr std::string_view kRoundsHeader =
    "session_id,round,treatment,bidder1_id,value1,bid1,bidder2_id,value2,bid2,seller_id,winner_id,price";

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);
/// Fixed notation with `digits` decimals.
std::string format_fixed(double x, int digits);

/// Parses a bids or rounds CSV; the schema is chosen by the header line.
/// Throws InputError with a line number on any malformed row.
Dataset parse_dataset(std::istream& in, const std::string& source);
Dataset read_dataset(const std::string& path);

std::string rounds_csv(const Dataset& d);
std::string bids_csv(const Dataset& d);
/// `theta,bid` rows with 12 significant digits.
std::string bid_function_csv(const BidFunction& f);
std::string regression_csv(const RegressionResult& r);
std::string seller_table_csv(const SellerTypeTable& t);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace auctionlab
