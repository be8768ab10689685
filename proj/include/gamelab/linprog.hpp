#pragma once

#include <string>
#include <vector>

#include "gamelab/rational.hpp"

namespace gamelab {

enum class LpStatus { optimal, infeasible, unbounded };
enum class Relation { le, eq, ge };
enum class LpSense { maximize, minimize };

struct LpConstraint {
  RatVec coeffs;
  Relation rel = Relation::le;
  Rational rhs;
};

// Exact-rational linear program. Variables default to nonnegative; a free
// variable is marked by nonneg[j] = false and split internally.
struct LinearProgram {
  int num_vars = 0;
  LpSense sense = LpSense::maximize;
  RatVec objective;
  std::vector<LpConstraint> constraints;
  std::vector<bool> nonneg;

  static LinearProgram make(int num_vars, LpSense sense = LpSense::maximize);
  void add_constraint(RatVec coeffs, Relation rel, Rational rhs);
  void validate() const;  // throws std::invalid_argument on dimension mismatch
};

struct LpOutcome {
  LpStatus status = LpStatus::infeasible;
  Rational value;
  RatVec solution;
};

// Two-phase primal simplex with Bland's pivoting rule. Exact over the
// rationals; deterministic for identical inputs.
LpOutcome solve_lp(const LinearProgram& lp);

// Phase-one only: returns any point of the polytope, or status infeasible.
// The outcome's value is the objective evaluated at that point.
LpOutcome feasible_point(const LinearProgram& lp);

// Debug rendering, one constraint per line, rationals as "p/q".
std::string dump_lp(const LinearProgram& lp);

const char* to_string(LpStatus s);

}  // namespace gamelab
