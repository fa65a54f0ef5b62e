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

#include <stdexcept>
#include <string>

namespace auctionlab {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  kInput = 2,
  kSolver = 3,
  kSize = 4,
  kIdentification = 5,
  kDomain = 6,
  kUndefinedStatistic = 7,
  kDegenerateObservation = 8,
  kInternal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::kDomain, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorCode::kInput, what) {}
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual)
      : Error(ErrorCode::kSolver, what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(ErrorCode::kSize, what) {}
};

class IdentificationError : public Error {
 public:
  explicit IdentificationError(const std::string& what)
      : Error(ErrorCode::kIdentification, what) {}
};

class UndefinedStatisticError : public Error {
 public:
  explicit UndefinedStatisticError(const std::string& what)
      : Error(ErrorCode::kUndefinedStatistic, what) {}
};

class DegenerateObservationError : public Error {
 public:
  explicit DegenerateObservationError(const std::string& what)
      : Error(ErrorCode::kDegenerateObservation, what) {}
};

}  // namespace auctionlab
