#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gamelab/linprog.hpp"
#include "oracles.hpp"

using namespace gamelab;

namespace {

bool satisfies_all(const LinearProgram& lp, const RatVec& x) {
  for (int j = 0; j < lp.num_vars; ++j)
    if (lp.nonneg[j] && x[j].sign() < 0) return false;
  for (const auto& c : lp.constraints) {
    Rational lhs = dot(c.coeffs, x);
    if (c.rel == Relation::le && lhs > c.rhs) return false;
    if (c.rel == Relation::ge && lhs < c.rhs) return false;
    if (c.rel == Relation::eq && lhs != c.rhs) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single-variable box") {
  LinearProgram lp = LinearProgram::make(1);
  lp.objective = {Rational(1)};
  lp.add_constraint({Rational(1)}, Relation::le, Rational(1));
  LpOutcome out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::optimal);
  CHECK(out.value == Rational(1));
  CHECK(out.solution == RatVec{Rational(1)});
}

TEST_CASE("infeasible and unbounded classification") {
  LinearProgram bad = LinearProgram::make(1);
  bad.add_constraint({Rational(1)}, Relation::le, Rational(-1));
  CHECK(solve_lp(bad).status == LpStatus::infeasible);
  CHECK(feasible_point(bad).status == LpStatus::infeasible);

  LinearProgram unbounded = LinearProgram::make(1);
  unbounded.objective = {Rational(1)};
  CHECK(solve_lp(unbounded).status == LpStatus::unbounded);
}

TEST_CASE("equality segment feasibility") {
  LinearProgram lp = LinearProgram::make(2);
  lp.add_constraint({Rational(1), Rational(1)}, Relation::eq, Rational(1));
  LpOutcome out = feasible_point(lp);
  REQUIRE(out.status == LpStatus::optimal);
  CHECK(out.solution[0] + out.solution[1] == Rational(1));
  CHECK(out.solution[0].sign() >= 0);
  CHECK(out.solution[1].sign() >= 0);
}

TEST_CASE("free variables can go negative") {
  LinearProgram lp = LinearProgram::make(1);
  lp.nonneg[0] = false;
  lp.objective = {Rational(1)};
  lp.add_constraint({Rational(1)}, Relation::le, Rational(-5));
  LpOutcome out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::optimal);
  CHECK(out.value == Rational(-5));
}

TEST_CASE("minimization sense") {
  LinearProgram lp = LinearProgram::make(2, LpSense::minimize);
  lp.objective = {Rational(3), Rational(5)};
  lp.add_constraint({Rational(1), Rational(1)}, Relation::ge, Rational(2));
  LpOutcome out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::optimal);
  CHECK(out.value == Rational(6));  // all mass on the cheap variable
}

TEST_CASE("dimension mismatch is a structural error") {
  LinearProgram lp = LinearProgram::make(2);
  lp.add_constraint({Rational(1)}, Relation::le, Rational(1));
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}

TEST_CASE("weak duality spot check") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6.
  LinearProgram lp = LinearProgram::make(2);
  lp.objective = {Rational(1), Rational(1)};
  lp.add_constraint({Rational(1), Rational(2)}, Relation::le, Rational(4));
  lp.add_constraint({Rational(3), Rational(1)}, Relation::le, Rational(6));
  LpOutcome out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::optimal);
  CHECK(out.value == Rational(14, 5));
  // Dual-feasible multipliers (2/5, 1/5) bound the primal from above.
  Rational dual_bound = Rational(2, 5) * Rational(4) + Rational(1, 5) * Rational(6);
  CHECK(out.value <= dual_bound);
  CHECK(out.value == dual_bound);  // and this pair is optimal
}

TEST_CASE("optimal solutions satisfy constraints exactly") {
  std::uint64_t state = 7;
  auto coeff = [&]() {
    state = splitmix64(state);
    return Rational(static_cast<long>(state % 7) - 3);
  };
  for (int trial = 0; trial < 80; ++trial) {
    LinearProgram lp = LinearProgram::make(3);
    for (int j = 0; j < 3; ++j) lp.objective[j] = coeff();
    for (int r = 0; r < 5; ++r) {
      RatVec row = {coeff(), coeff(), coeff()};
      state = splitmix64(state);
      Rational rhs(static_cast<long>(state % 9) - 2);
      state = splitmix64(state);
      Relation rel = (state % 3 == 0) ? Relation::ge : (state % 3 == 1) ? Relation::le
                                                                        : Relation::eq;
      lp.add_constraint(std::move(row), rel, rhs);
    }
    // Box keeps the polytope bounded so vertex enumeration is a full oracle.
    for (int j = 0; j < 3; ++j) {
      RatVec e(3, Rational(0));
      e[j] = Rational(1);
      lp.add_constraint(std::move(e), Relation::le, Rational(5));
    }
    LpOutcome mine = solve_lp(lp);
    auto truth = oracle::enumerate_vertices(lp);
    if (truth.feasible) {
      REQUIRE(mine.status == LpStatus::optimal);
      CHECK(mine.value == truth.best_value);
      CHECK(satisfies_all(lp, mine.solution));
      LpOutcome point = feasible_point(lp);
      REQUIRE(point.status == LpStatus::optimal);
      CHECK(satisfies_all(lp, point.solution));
    } else {
      CHECK(mine.status == LpStatus::infeasible);
      CHECK(feasible_point(lp).status == LpStatus::infeasible);
    }
  }
}

TEST_CASE("determinism: identical inputs give identical outcomes") {
  LinearProgram lp = LinearProgram::make(4);
  lp.objective = {Rational(1), Rational(1), Rational(1), Rational(1)};
  lp.add_constraint({Rational(1), Rational(1), Rational(1), Rational(1)}, Relation::le,
                    Rational(1));
  lp.add_constraint({Rational(1), Rational(-1), Rational(0), Rational(0)}, Relation::le,
                    Rational(0));
  LpOutcome a = solve_lp(lp);
  LpOutcome b = solve_lp(lp);
  REQUIRE(a.status == b.status);
  CHECK(a.value == b.value);
  CHECK(a.solution == b.solution);
}

TEST_CASE("degenerate polytope terminates under Bland") {
  // Many redundant constraints through the same vertex.
  LinearProgram lp = LinearProgram::make(3);
  lp.objective = {Rational(1), Rational(2), Rational(3)};
  lp.add_constraint({Rational(1), Rational(1), Rational(1)}, Relation::le, Rational(1));
  lp.add_constraint({Rational(2), Rational(2), Rational(2)}, Relation::le, Rational(2));
  lp.add_constraint({Rational(1), Rational(1), Rational(1)}, Relation::ge, Rational(1));
  lp.add_constraint({Rational(0), Rational(1), Rational(1)}, Relation::le, Rational(1));
  LpOutcome out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::optimal);
  CHECK(out.value == Rational(3));
}

TEST_CASE("lp debug dump") {
  LinearProgram lp = LinearProgram::make(2);
  lp.objective = {Rational(1, 2), Rational(-1)};
  lp.add_constraint({Rational(1), Rational(1)}, Relation::eq, Rational(1));
  std::string text = dump_lp(lp);
  CHECK(text.find("max 1/2 -1") != std::string::npos);
  CHECK(text.find("1 1 = 1") != std::string::npos);
}
