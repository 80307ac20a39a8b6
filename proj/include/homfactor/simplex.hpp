#pragma once

#include <utility>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/rational.hpp"

namespace homfactor {

// Exact rational linear programming via two-phase primal simplex with
// Bland's rule. Exactness makes cycling the only termination risk and
// Bland's rule removes it, so every answer is the true optimum; callers
// certify optima by LP duality where it matters.
class LinearProgram {
 public:
  enum class Sense { Minimize, Maximize };
  enum class Rel { Le, Ge, Eq };

  int add_variable() {
    ++nvars_;
    return nvars_ - 1;
  }

  int variable_count() const { return nvars_; }

  void add_constraint(std::vector<std::pair<int, Rational>> terms, Rel rel, Rational rhs) {
    for (auto& [j, c] : terms)
      if (j < 0 || j >= nvars_) throw BadScope("LinearProgram: term references unknown variable");
    rows_.push_back({std::move(terms), rel, std::move(rhs)});
  }

  void set_objective(Sense sense, std::vector<std::pair<int, Rational>> terms) {
    for (auto& [j, c] : terms)
      if (j < 0 || j >= nvars_) throw BadScope("LinearProgram: objective references unknown variable");
    sense_ = sense;
    objective_ = std::move(terms);
  }

  struct Row {
    std::vector<std::pair<int, Rational>> terms;
    Rel rel;
    Rational rhs;
  };

  int nvars_ = 0;
  Sense sense_ = Sense::Minimize;
  std::vector<std::pair<int, Rational>> objective_;
  std::vector<Row> rows_;
};

struct LpSolution {
  Rational value;
  std::vector<Rational> x;
};

namespace detail {

class SimplexTableau {
 public:
  // columns: structural | slack/surplus | artificial | rhs
  int m, nstruct, nslack, nart, ncols;
  std::vector<std::vector<Rational>> t;  // m rows
  std::vector<Rational> obj;             // reduced-cost row, obj[ncols-1] = -value
  std::vector<int> basis;

  explicit SimplexTableau(const LinearProgram& lp) {
    m = static_cast<int>(lp.rows_.size());
    nstruct = lp.nvars_;
    nslack = 0;
    nart = 0;
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    for (int i = 0; i < m; ++i) {
      // after normalizing rhs >= 0: Le gets a slack, Ge a surplus + artificial,
      // Eq an artificial
      auto rel = lp.rows_[i].rel;
      bool flip = lp.rows_[i].rhs < 0;
      if (flip) rel = rel == LinearProgram::Rel::Le   ? LinearProgram::Rel::Ge
                      : rel == LinearProgram::Rel::Ge ? LinearProgram::Rel::Le
                                                      : LinearProgram::Rel::Eq;
      if (rel != LinearProgram::Rel::Eq) slack_col[i] = nstruct + nslack++;
      if (rel != LinearProgram::Rel::Le) art_col[i] = nslack;  // fixed up below
    }
    for (int i = 0; i < m; ++i)
      if (art_col[i] >= 0) art_col[i] = nstruct + nslack + nart++;
    ncols = nstruct + nslack + nart + 1;
    t.assign(m, std::vector<Rational>(ncols, Rational(0)));
    basis.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      const auto& row = lp.rows_[i];
      bool flip = row.rhs < 0;
      Rational sign = flip ? Rational(-1) : Rational(1);
      for (const auto& [j, c] : row.terms) t[i][j] += sign * c;
      t[i][ncols - 1] = sign * row.rhs;
      auto rel = row.rel;
      if (flip) rel = rel == LinearProgram::Rel::Le   ? LinearProgram::Rel::Ge
                      : rel == LinearProgram::Rel::Ge ? LinearProgram::Rel::Le
                                                      : LinearProgram::Rel::Eq;
      if (rel == LinearProgram::Rel::Le) {
        t[i][slack_col[i]] = 1;
        basis[i] = slack_col[i];
      } else if (rel == LinearProgram::Rel::Ge) {
        t[i][slack_col[i]] = -1;
        t[i][art_col[i]] = 1;
        basis[i] = art_col[i];
      } else {
        t[i][art_col[i]] = 1;
        basis[i] = art_col[i];
      }
    }
  }

  bool is_artificial(int col) const { return col >= nstruct + nslack && col < ncols - 1; }

  void pivot(int row, int col) {
    Rational p = t[row][col];
    for (auto& v : t[row]) v /= p;
    for (int i = 0; i < m; ++i) {
      if (i == row || t[i][col] == 0) continue;
      Rational f = t[i][col];
      for (int j = 0; j < ncols; ++j) t[i][j] -= f * t[row][j];
    }
    if (obj[col] != 0) {
      Rational f = obj[col];
      for (int j = 0; j < ncols; ++j) obj[j] -= f * t[row][j];
    }
    basis[row] = col;
  }

  // cost[j] over all columns except rhs; returns false on unbounded
  bool run(const std::vector<Rational>& cost, bool allow_artificial_entering) {
    obj.assign(ncols, Rational(0));
    for (int j = 0; j < ncols - 1; ++j) obj[j] = cost[j];
    for (int i = 0; i < m; ++i) {
      if (obj[basis[i]] == 0) continue;
      Rational f = obj[basis[i]];
      for (int j = 0; j < ncols; ++j) obj[j] -= f * t[i][j];
    }
    long iterations = 0;
    const long cap = 1'000'000;
    for (;;) {
      if (++iterations > cap) throw Error("simplex: iteration cap exceeded");
      int enter = -1;
      for (int j = 0; j < ncols - 1; ++j) {
        if (!allow_artificial_entering && is_artificial(j)) continue;
        if (obj[j] < 0) {
          enter = j;
          break;  // Bland: lowest index
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best_ratio;
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= 0) continue;
        Rational ratio = t[i][ncols - 1] / t[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
  }

  Rational objective_value() const { return -obj[ncols - 1]; }
};

}  // namespace detail

// Throws Infeasible when no feasible point exists and Error("unbounded")
// when the optimum is unbounded; otherwise the exact optimum and one optimal
// assignment (variables not in the final basis are 0).
inline LpSolution solve_lp(const LinearProgram& lp) {
  detail::SimplexTableau tab(lp);

  if (tab.nart > 0) {
    std::vector<Rational> phase1(tab.ncols - 1, Rational(0));
    for (int j = tab.nstruct + tab.nslack; j < tab.ncols - 1; ++j) phase1[j] = 1;
    if (!tab.run(phase1, true)) throw Error("simplex: phase 1 unbounded (internal)");
    if (tab.objective_value() != 0) throw Infeasible("linear program is infeasible");
    // drive remaining artificials out of the basis; rows that cannot pivot
    // are redundant and harmless (they stay with rhs 0)
    for (int i = 0; i < tab.m; ++i) {
      if (!tab.is_artificial(tab.basis[i])) continue;
      for (int j = 0; j < tab.nstruct + tab.nslack; ++j)
        if (tab.t[i][j] != 0) {
          tab.pivot(i, j);
          break;
        }
    }
  }

  std::vector<Rational> cost(tab.ncols - 1, Rational(0));
  bool maximize = lp.sense_ == LinearProgram::Sense::Maximize;
  for (const auto& [j, c] : lp.objective_) cost[j] += maximize ? -c : c;
  if (!tab.run(cost, false)) throw Error("linear program is unbounded");

  LpSolution sol;
  sol.x.assign(lp.nvars_, Rational(0));
  for (int i = 0; i < tab.m; ++i)
    if (tab.basis[i] < lp.nvars_) sol.x[tab.basis[i]] = tab.t[i][tab.ncols - 1];
  sol.value = maximize ? -tab.objective_value() : tab.objective_value();
  return sol;
}

}  // namespace homfactor
