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
#include <optional>
#include <string>
#include <vector>

namespace auctionlab {

enum class VarBound {
  kFree,
  kNonPositive,
  kNonNegative,
  /// x > 0, decided as x >= strict_eps.
  kPositive,
};

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct LinearTerm {
  std::size_t var;
  double coef;
};

/// sum(terms) rel rhs. A strict constraint (`<` or `>`) is decided as
/// sum <= rhs - eps or sum >= rhs + eps.
struct Constraint {
  std::vector<LinearTerm> terms;
  Relation rel = Relation::kLessEqual;
  double rhs = 0.0;
  bool strict = false;
  std::string label;
};

struct Variable {
  std::string name;
  VarBound bound = VarBound::kFree;
};

/// A system of linear (in)equalities over named real variables.
class LPSystem {
 public:
  std::size_t add_variable(std::string name, VarBound bound);
  void add_constraint(Constraint c);

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_constraints() const noexcept { return constraints_.size(); }

  /// Number of constraints whose label starts with `prefix`.
  std::size_t count_labelled(const std::string& prefix) const;

  /// Throws DomainError if a coefficient or right-hand side is not finite, a
  /// term references an unknown variable, or a free variable appears in no
  /// constraint (bounded variables are referenced by their bound).
  void validate() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
};

inline constexpr double kDefaultStrictEps = 1e-7;

/// Feasibility of the closed system obtained by replacing strict relations
/// with eps-margins. Returns a witness assignment when feasible. The system
/// is split into connected components (variables linked through shared
/// constraints) and each is decided by a phase-I simplex.
std::optional<std::vector<double>> find_feasible_point(const LPSystem& lp,
                                                       double strict_eps = kDefaultStrictEps);

bool check_feasible(const LPSystem& lp, double strict_eps = kDefaultStrictEps);

/// Largest violation of `point` against the eps-closed system (0 when the
/// point satisfies every bound and constraint).
double max_violation(const LPSystem& lp, const std::vector<double>& point,
                     double strict_eps = kDefaultStrictEps);

}  // namespace auctionlab
