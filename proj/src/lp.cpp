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

#include "auctionlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "auctionlab/errors.hpp"

namespace auctionlab {

std::size_t LPSystem::add_variable(std::string name, VarBound bound) {
  variables_.push_back({std::move(name), bound});
  return variables_.size() - 1;
}

void LPSystem::add_constraint(Constraint c) { constraints_.push_back(std::move(c)); }

std::size_t LPSystem::count_labelled(const std::string& prefix) const {
  return static_cast<std::size_t>(std::count_if(
      constraints_.begin(), constraints_.end(),
      [&](const Constraint& c) { return c.label.compare(0, prefix.size(), prefix) == 0; }));
}

void LPSystem::validate() const {
  std::vector<bool> referenced(variables_.size(), false);
  for (const auto& c : constraints_) {
    if (!std::isfinite(c.rhs)) throw DomainError("constraint '" + c.label + "' has a non-finite rhs");
    for (const auto& t : c.terms) {
      if (t.var >= variables_.size())
        throw DomainError("constraint '" + c.label + "' references an unknown variable");
      if (!std::isfinite(t.coef))
        throw DomainError("constraint '" + c.label + "' has a non-finite coefficient");
      referenced[t.var] = true;
    }
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (!referenced[v] && variables_[v].bound == VarBound::kFree)
      throw DomainError("variable '" + variables_[v].name + "' is not referenced by any constraint");
  }
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Dense phase-I simplex for { A y (<=,>=,=) b, y >= 0 }.
class PhaseOne {
 public:
  struct Row {
    std::vector<double> coefs;  // length = structural columns
    Relation rel;
    double rhs;
  };

  PhaseOne(std::size_t n_structural, std::vector<Row> rows) : n_(n_structural) {
    // Normalize to rhs >= 0.
    for (auto& r : rows) {
      if (r.rhs < 0.0) {
        for (auto& c : r.coefs) c = -c;
        r.rhs = -r.rhs;
        if (r.rel == Relation::kLessEqual) {
          r.rel = Relation::kGreaterEqual;
        } else if (r.rel == Relation::kGreaterEqual) {
          r.rel = Relation::kLessEqual;
        }
      }
    }
    m_ = rows.size();
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const auto& r : rows) {
      if (r.rel != Relation::kEqual) ++n_slack;
      if (r.rel != Relation::kLessEqual) ++n_art;
    }
    art_begin_ = n_ + n_slack;
    cols_ = n_ + n_slack + n_art;
    width_ = cols_ + 1;
    tab_.assign((m_ + 1) * width_, 0.0);
    basis_.assign(m_, 0);

    std::size_t slack = n_;
    std::size_t art = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& r = rows[i];
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = r.coefs[j];
      at(i, cols_) = r.rhs;
      if (r.rel == Relation::kLessEqual) {
        at(i, slack) = 1.0;
        basis_[i] = slack++;
      } else {
        if (r.rel == Relation::kGreaterEqual) at(i, slack++) = -1.0;
        at(i, art) = 1.0;
        basis_[i] = art++;
      }
    }
    // Objective row: minimize the sum of artificials, priced out.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (j >= art_begin_ && j < cols_) continue;
        at(m_, j) -= at(i, j);
      }
    }
  }

  bool solve() {
    std::size_t degenerate_run = 0;
    const std::size_t max_pivots = 50 * (m_ + cols_) + 1000;
    for (std::size_t it = 0; it < max_pivots; ++it) {
      const bool bland = degenerate_run > 30;
      std::size_t enter = cols_;
      double best = -kFeasTol;
      for (std::size_t j = 0; j < cols_; ++j) {
        const double rc = at(m_, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter == cols_) break;
      std::size_t leave = m_;
      double ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double q = at(i, cols_) / a;
        if (leave == m_ || q < ratio - 1e-12 ||
            (q <= ratio + 1e-12 && basis_[i] < basis_[leave])) {
          leave = i;
          ratio = q;
        }
      }
      if (leave == m_) break;  // unbounded direction; cannot occur in phase I
      degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    return -at(m_, cols_) <= kFeasTol * std::max(1.0, scale_);
  }

  std::vector<double> structural_values() const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) y[basis_[i]] = at(i, cols_);
    }
    return y;
  }

  void set_scale(double s) { scale_ = s; }

 private:
  double& at(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return tab_[i * width_ + j]; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    double* prow = &tab_[row * width_];
    for (std::size_t j = 0; j < width_; ++j) prow[j] /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      double* r = &tab_[i * width_];
      const double f = r[col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) r[j] -= f * prow[j];
      r[col] = 0.0;
    }
    basis_[row] = col;
  }

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t cols_ = 0;
  std::size_t width_ = 0;
  std::size_t art_begin_ = 0;
  double scale_ = 1.0;
  std::vector<double> tab_;
  std::vector<std::size_t> basis_;
};

double effective_rhs(const Constraint& c, double eps) {
  if (!c.strict) return c.rhs;
  if (c.rel == Relation::kLessEqual) return c.rhs - eps;
  if (c.rel == Relation::kGreaterEqual) return c.rhs + eps;
  return c.rhs;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

// Solves one component: variables `vars`, constraints `rows` (indices into lp).
bool solve_component(const LPSystem& lp, const std::vector<std::size_t>& vars,
                     const std::vector<std::size_t>& rows, double eps, std::vector<double>& point) {
  // Column layout per original variable: free -> (p, q), others -> p.
  std::vector<std::size_t> first_col(lp.num_variables(), 0);
  std::size_t n_cols = 0;
  for (std::size_t v : vars) {
    first_col[v] = n_cols;
    n_cols += lp.variables()[v].bound == VarBound::kFree ? 2 : 1;
  }
  std::vector<PhaseOne::Row> prows;
  prows.reserve(rows.size());
  double scale = 1.0;
  for (std::size_t ci : rows) {
    const auto& c = lp.constraints()[ci];
    PhaseOne::Row r{std::vector<double>(n_cols, 0.0), c.rel, effective_rhs(c, eps)};
    for (const auto& t : c.terms) {
      const auto& var = lp.variables()[t.var];
      const std::size_t col = first_col[t.var];
      switch (var.bound) {
        case VarBound::kFree:
          r.coefs[col] += t.coef;
          r.coefs[col + 1] -= t.coef;
          break;
        case VarBound::kNonPositive: r.coefs[col] -= t.coef; break;
        case VarBound::kNonNegative: r.coefs[col] += t.coef; break;
        case VarBound::kPositive:
          r.coefs[col] += t.coef;
          r.rhs -= t.coef * eps;
          break;
      }
    }
    scale = std::max(scale, std::abs(r.rhs));
    prows.push_back(std::move(r));
  }
  PhaseOne simplex(n_cols, std::move(prows));
  simplex.set_scale(scale);
  if (!simplex.solve()) return false;
  const auto y = simplex.structural_values();
  for (std::size_t v : vars) {
    const std::size_t col = first_col[v];
    switch (lp.variables()[v].bound) {
      case VarBound::kFree: point[v] = y[col] - y[col + 1]; break;
      case VarBound::kNonPositive: point[v] = -y[col]; break;
      case VarBound::kNonNegative: point[v] = y[col]; break;
      case VarBound::kPositive: point[v] = eps + y[col]; break;
    }
  }
  return true;
}

}  // namespace

std::optional<std::vector<double>> find_feasible_point(const LPSystem& lp, double strict_eps) {
  lp.validate();
  const std::size_t nv = lp.num_variables();
  std::vector<double> point(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    if (lp.variables()[v].bound == VarBound::kPositive) point[v] = strict_eps;
  }

  std::vector<std::size_t> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& c : lp.constraints()) {
    if (c.terms.empty()) {
      const double rhs = effective_rhs(c, strict_eps);
      const bool ok = c.rel == Relation::kLessEqual    ? 0.0 <= rhs + kFeasTol
                      : c.rel == Relation::kGreaterEqual ? 0.0 >= rhs - kFeasTol
                                                         : std::abs(rhs) <= kFeasTol;
      if (!ok) return std::nullopt;
      continue;
    }
    const std::size_t root = find_root(parent, c.terms.front().var);
    for (const auto& t : c.terms) parent[find_root(parent, t.var)] = root;
  }

  std::vector<std::vector<std::size_t>> comp_vars(nv);
  std::vector<std::vector<std::size_t>> comp_rows(nv);
  for (std::size_t v = 0; v < nv; ++v) comp_vars[find_root(parent, v)].push_back(v);
  for (std::size_t ci = 0; ci < lp.num_constraints(); ++ci) {
    const auto& c = lp.constraints()[ci];
    if (!c.terms.empty()) comp_rows[find_root(parent, c.terms.front().var)].push_back(ci);
  }
  for (std::size_t root = 0; root < nv; ++root) {
    if (comp_rows[root].empty()) continue;
    if (!solve_component(lp, comp_vars[root], comp_rows[root], strict_eps, point)) return std::nullopt;
  }
  return point;
}

bool check_feasible(const LPSystem& lp, double strict_eps) {
  return find_feasible_point(lp, strict_eps).has_value();
}

double max_violation(const LPSystem& lp, const std::vector<double>& point, double strict_eps) {
  double worst = 0.0;
  for (std::size_t v = 0; v < lp.num_variables(); ++v) {
    switch (lp.variables()[v].bound) {
      case VarBound::kFree: break;
      case VarBound::kNonPositive: worst = std::max(worst, point[v]); break;
      case VarBound::kNonNegative: worst = std::max(worst, -point[v]); break;
      case VarBound::kPositive: worst = std::max(worst, strict_eps - point[v]); break;
    }
  }
  for (const auto& c : lp.constraints()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * point[t.var];
    const double rhs = effective_rhs(c, strict_eps);
    switch (c.rel) {
      case Relation::kLessEqual: worst = std::max(worst, lhs - rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, rhs - lhs); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(lhs - rhs)); break;
    }
  }
  return worst;
}

}  // namespace auctionlab
