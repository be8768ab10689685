#include "gamelab/linprog.hpp"

#include <sstream>

namespace gamelab {

LinearProgram LinearProgram::make(int num_vars, LpSense sense) {
  LinearProgram lp;
  lp.num_vars = num_vars;
  lp.sense = sense;
  lp.objective.assign(num_vars, Rational());
  lp.nonneg.assign(num_vars, true);
  return lp;
}

void LinearProgram::add_constraint(RatVec coeffs, Relation rel, Rational rhs) {
  constraints.push_back({std::move(coeffs), rel, std::move(rhs)});
}

void LinearProgram::validate() const {
  if (num_vars < 0) throw std::invalid_argument("LinearProgram: negative num_vars");
  if (static_cast<int>(objective.size()) != num_vars)
    throw std::invalid_argument("LinearProgram: objective length != num_vars");
  if (static_cast<int>(nonneg.size()) != num_vars)
    throw std::invalid_argument("LinearProgram: nonneg length != num_vars");
  for (const auto& c : constraints)
    if (static_cast<int>(c.coeffs.size()) != num_vars)
      throw std::invalid_argument("LinearProgram: constraint length != num_vars");
}

namespace {

// Full-tableau simplex over exact rationals.
//
// The input LP is reduced to   max c.x  s.t.  A x <= b,  x >= 0:
//   - free variables are split x = x+ - x-,
//   - equalities become a <=/>= pair,
//   - >= rows are negated.
// Phase one introduces artificial variables for rows whose slack cannot start
// basic; Bland's rule (lowest eligible index everywhere) guarantees
// termination on degenerate polytopes.
class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, bool feasibility_only)
      : lp_(lp), feasibility_only_(feasibility_only) {}

  LpOutcome run() {
    reduce();
    if (!phase_one()) return {LpStatus::infeasible, Rational(), {}};
    if (feasibility_only_) return extract();
    LpStatus st = phase_two();
    if (st == LpStatus::unbounded) return {LpStatus::unbounded, Rational(), {}};
    return extract();
  }

 private:
  const LinearProgram& lp_;
  bool feasibility_only_;

  int n_ = 0;                     // columns for the reduced decision variables
  std::vector<int> pos_col_;      // original var -> column
  std::vector<int> neg_col_;      // original var -> negative part column (-1 if nonneg)
  RatVec cost_;                   // reduced objective, always a maximization
  std::vector<RatVec> rows_;      // A of the <=-form
  RatVec rhs_;

  int total_cols_ = 0;            // decision + slack (+ artificial) columns
  int art_begin_ = 0;             // first artificial column (== total before artificials)
  std::vector<RatVec> tab_;       // m rows, total_cols_+1 entries (rhs last)
  RatVec zrow_;                   // objective row, same width
  std::vector<int> basis_;

  void reduce() {
    lp_.validate();
    pos_col_.assign(lp_.num_vars, -1);
    neg_col_.assign(lp_.num_vars, -1);
    for (int j = 0; j < lp_.num_vars; ++j) {
      pos_col_[j] = n_++;
      if (!lp_.nonneg[j]) neg_col_[j] = n_++;
    }
    cost_.assign(n_, Rational());
    Rational flip(lp_.sense == LpSense::minimize ? -1 : 1);
    for (int j = 0; j < lp_.num_vars; ++j) {
      cost_[pos_col_[j]] = flip * lp_.objective[j];
      if (neg_col_[j] >= 0) cost_[neg_col_[j]] = -flip * lp_.objective[j];
    }
    auto expand = [&](const RatVec& coeffs, int sign_flip) {
      RatVec row(n_, Rational());
      Rational s(sign_flip);
      for (int j = 0; j < lp_.num_vars; ++j) {
        row[pos_col_[j]] = s * coeffs[j];
        if (neg_col_[j] >= 0) row[neg_col_[j]] = -s * coeffs[j];
      }
      return row;
    };
    for (const auto& c : lp_.constraints) {
      switch (c.rel) {
        case Relation::le:
          rows_.push_back(expand(c.coeffs, 1));
          rhs_.push_back(c.rhs);
          break;
        case Relation::ge:
          rows_.push_back(expand(c.coeffs, -1));
          rhs_.push_back(-c.rhs);
          break;
        case Relation::eq:
          rows_.push_back(expand(c.coeffs, 1));
          rhs_.push_back(c.rhs);
          rows_.push_back(expand(c.coeffs, -1));
          rhs_.push_back(-c.rhs);
          break;
      }
    }
  }

  void pivot(int row, int col) {
    const Rational piv = tab_[row][col];
    for (auto& v : tab_[row]) v /= piv;
    for (size_t r = 0; r < tab_.size(); ++r) {
      if (static_cast<int>(r) == row || tab_[r][col].is_zero()) continue;
      const Rational factor = tab_[r][col];
      for (size_t k = 0; k < tab_[r].size(); ++k) tab_[r][k] -= factor * tab_[row][k];
    }
    if (!zrow_[col].is_zero()) {
      const Rational factor = zrow_[col];
      for (size_t k = 0; k < zrow_.size(); ++k) zrow_[k] -= factor * tab_[row][k];
    }
    basis_[row] = col;
  }

  // Bland: enter the lowest-index improving column; leave via the minimum
  // ratio, ties resolved by the lowest basic-variable index.
  // Returns optimal/unbounded.
  LpStatus iterate(const std::vector<bool>& allowed) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < total_cols_; ++j) {
        if (allowed[j] && zrow_[j].sign() < 0) { enter = j; break; }
      }
      if (enter < 0) return LpStatus::optimal;
      int leave = -1;
      Rational best_ratio;
      for (size_t r = 0; r < tab_.size(); ++r) {
        if (tab_[r][enter].sign() <= 0) continue;
        Rational ratio = tab_[r].back() / tab_[r][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = static_cast<int>(r);
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
  }

  bool phase_one() {
    const int m = static_cast<int>(rows_.size());
    art_begin_ = n_ + m;
    // Count artificials: one per row with negative rhs.
    int n_art = 0;
    for (int r = 0; r < m; ++r)
      if (rhs_[r].sign() < 0) ++n_art;
    total_cols_ = n_ + m + n_art;
    tab_.assign(m, RatVec(total_cols_ + 1, Rational()));
    basis_.assign(m, -1);
    int next_art = art_begin_;
    for (int r = 0; r < m; ++r) {
      bool flip = rhs_[r].sign() < 0;
      Rational s(flip ? -1 : 1);
      for (int j = 0; j < n_; ++j) tab_[r][j] = s * rows_[r][j];
      tab_[r][n_ + r] = s;  // slack
      tab_[r].back() = s * rhs_[r];
      if (flip) {
        tab_[r][next_art] = Rational(1);
        basis_[r] = next_art++;
      } else {
        basis_[r] = n_ + r;
      }
    }
    zrow_.assign(total_cols_ + 1, Rational());
    if (n_art > 0) {
      // Maximize -(sum of artificials); make the row consistent with the basis.
      for (int j = art_begin_; j < total_cols_; ++j) zrow_[j] = Rational(1);
      for (int r = 0; r < m; ++r)
        if (basis_[r] >= art_begin_)
          for (size_t k = 0; k < zrow_.size(); ++k) zrow_[k] -= tab_[r][k];
      std::vector<bool> allowed(total_cols_, true);
      iterate(allowed);  // bounded below by 0, cannot be unbounded
      if (zrow_.back().sign() < 0) return false;  // positive artificial residue
      // Drive any degenerate artificials out of the basis.
      for (int r = 0; r < m; ++r) {
        if (basis_[r] < art_begin_) continue;
        int col = -1;
        for (int j = 0; j < art_begin_; ++j)
          if (!tab_[r][j].is_zero()) { col = j; break; }
        if (col >= 0) pivot(r, col);
      }
      // Remaining artificial rows are redundant (all-zero); drop them.
      for (int r = m - 1; r >= 0; --r) {
        if (basis_[r] >= art_begin_) {
          tab_.erase(tab_.begin() + r);
          basis_.erase(basis_.begin() + r);
        }
      }
      // Erase artificial columns.
      for (auto& row : tab_) row.erase(row.begin() + art_begin_, row.begin() + total_cols_);
      total_cols_ = art_begin_;
    }
    return true;
  }

  LpStatus phase_two() {
    zrow_.assign(total_cols_ + 1, Rational());
    for (int j = 0; j < n_; ++j) zrow_[j] = -cost_[j];
    for (size_t r = 0; r < tab_.size(); ++r) {
      int b = basis_[r];
      if (b < n_ && !cost_[b].is_zero()) {
        const Rational cb = cost_[b];
        for (size_t k = 0; k < zrow_.size(); ++k) zrow_[k] += cb * tab_[r][k];
      }
    }
    std::vector<bool> allowed(total_cols_, true);
    return iterate(allowed);
  }

  LpOutcome extract() const {
    RatVec reduced(total_cols_, Rational());
    for (size_t r = 0; r < tab_.size(); ++r) reduced[basis_[r]] = tab_[r].back();
    RatVec x(lp_.num_vars, Rational());
    for (int j = 0; j < lp_.num_vars; ++j) {
      x[j] = reduced[pos_col_[j]];
      if (neg_col_[j] >= 0) x[j] -= reduced[neg_col_[j]];
    }
    LpOutcome out;
    out.status = LpStatus::optimal;
    out.solution = std::move(x);
    out.value = dot(lp_.objective, out.solution);
    return out;
  }
};

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) { return SimplexSolver(lp, false).run(); }

LpOutcome feasible_point(const LinearProgram& lp) { return SimplexSolver(lp, true).run(); }

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream os;
  os << (lp.sense == LpSense::maximize ? "max" : "min");
  for (const auto& c : lp.objective) os << ' ' << c.str();
  os << '\n';
  for (const auto& c : lp.constraints) {
    for (const auto& a : c.coeffs) os << a.str() << ' ';
    os << (c.rel == Relation::le ? "<=" : c.rel == Relation::ge ? ">=" : "=") << ' '
       << c.rhs.str() << '\n';
  }
  for (int j = 0; j < lp.num_vars; ++j)
    if (!lp.nonneg[j]) os << "free x" << j << '\n';
  return os.str();
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

}  // namespace gamelab
