#pragma once

#include <optional>

#include "gamelab/game.hpp"
#include "gamelab/linprog.hpp"

namespace gamelab {

// Joint distribution over the M x N pure action pairs. Exact distributions
// come from the LP pipeline; float ones from empirical play.
struct JointDistribution {
  int m = 0;
  int n = 0;
  bool exact = true;
  RatMat p;                              // used when exact
  std::vector<std::vector<double>> pf;   // used when !exact

  static JointDistribution from_exact(RatMat p);
  static JointDistribution from_float(std::vector<std::vector<double>> p);
  double at_f(int i, int j) const { return exact ? p[i][j].to_double() : pf[i][j]; }
  void validate() const;  // nonnegative; sums to 1 (exact) or within 1e-12
};

struct EquilibriumQuery {
  Game game;
  DeviationSet dev_a;
  DeviationSet dev_b;
  Player target = Player::A;
  LpSense sense = LpSense::maximize;  // maximize = Val, minimize = MinVal
};

// Constraint block of the generalized-equilibrium polytope over the MN
// variables sigma_ij (lexicographic, index i*N + j): simplex constraints plus
// one inequality per deviation of each player. Objective left at zero.
LinearProgram equilibrium_polytope(const Game& g, const DeviationSet& dev_a,
                                   const DeviationSet& dev_b);

struct ValueResult {
  Rational value;
  JointDistribution witness;
};

// Exact optimum of the target player's expected utility over the polytope.
ValueResult equilibrium_value(const EquilibriumQuery& q);

struct StackelbergResult {
  Rational value;
  RatVec leader_mixed;
  int follower_action = -1;
  std::vector<std::optional<Rational>> per_follower_values;  // nullopt = not inducible
};

// Per-follower-action LPs with weak inducibility constraints; ties among
// follower actions broken by the lowest index (which favors the leader, as
// each LP already maximizes the leader's utility).
StackelbergResult stackelberg(const Game& g, Player leader);

// Mixes the Stackelberg strategy with the margin-maximizing strategy of the
// chosen follower action at weight eps, making the follower's best response
// strictly unique when the game permits it. assumption_ok (optional out)
// reports whether that margin is strictly positive.
RatVec strict_stackelberg_strategy(const Game& g, Player leader, const Rational& eps,
                                   bool* assumption_ok = nullptr);

struct EquilibriumCheck {
  double max_violation_a = 0;
  double max_violation_b = 0;
  bool pass = false;
};

struct ExactEquilibriumCheck {
  Rational max_violation_a;
  Rational max_violation_b;
  bool pass = false;
};

// Maximum deviation gain of each player under sigma; passes iff both are <= eps.
EquilibriumCheck verify_approx_equilibrium(const Game& g, const JointDistribution& sigma,
                                           const DeviationSet& dev_a, const DeviationSet& dev_b,
                                           double eps);
// Exact-rational variant for exact distributions (eps may be 0).
ExactEquilibriumCheck verify_exact_equilibrium(const Game& g, const JointDistribution& sigma,
                                               const DeviationSet& dev_a,
                                               const DeviationSet& dev_b, const Rational& eps);

struct MetagameReport {
  Rational stack_a;
  Rational stack_b;
  bool exists_pair = false;  // some correlated equilibrium attains both Stackelberg values
  bool all_pairs = false;    // every correlated equilibrium does
  bool assumption_ok = true; // unique-inducibility condition held (warning otherwise)
  std::optional<JointDistribution> witness;
};

MetagameReport metagame_check(const Game& g);

// Maximizes a linear score sum score_ij * sigma_ij over the polytope.
JointDistribution select_equilibrium(const Game& g, const DeviationSet& dev_a,
                                     const DeviationSet& dev_b, const RatMat& score);

}  // namespace gamelab
