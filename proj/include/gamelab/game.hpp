#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gamelab/rational.hpp"

namespace gamelab {

enum class Player { A, B };

inline Player opponent_of(Player p) { return p == Player::A ? Player::B : Player::A; }
const char* to_string(Player p);

// Action-role layout of a separation-family game: M primary columns, M
// secondary columns, then the C(M,2) safety columns in lexicographic (i,j)
// order, i < j. Indices are 0-based.
struct SeparationMeta {
  int m = 0;
  std::vector<int> b_u;  // 0-based primary indices that are undominated

  int primary_col(int j) const { return j; }
  int secondary_col(int j) const { return m + j; }
  int safety_col(int i, int j) const;
  bool is_undominated(int j) const;
};

// Two-player bimatrix game with exact-rational utilities.
struct Game {
  int m = 0;  // optimizer (player A) action count
  int n = 0;  // learner (player B) action count
  RatMat u_a;
  RatMat u_b;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Rational utility_bound = Rational(3);
  std::optional<SeparationMeta> separation;

  void validate() const;  // shape + |entry| <= utility_bound

  const Rational& ua(int i, int j) const { return u_a[i][j]; }
  const Rational& ub(int i, int j) const { return u_b[i][j]; }
  const RatMat& utility(Player p) const { return p == Player::A ? u_a : u_b; }
  int actions(Player p) const { return p == Player::A ? m : n; }
  const std::string& label(Player p, int k) const {
    return p == Player::A ? row_labels[k] : col_labels[k];
  }

  // Expected utilities under mixed play.
  Rational expected(Player p, const RatVec& alpha, const RatVec& beta) const;
  // Per-action expected utility for `p` against the opponent's mixed strategy.
  RatVec payoff_vector(Player p, const RatVec& opponent_mixed) const;
};

Game make_game(RatMat u_a, RatMat u_b, std::vector<std::string> row_labels = {},
               std::vector<std::string> col_labels = {});

// Built-in games: "g1", "g2", "weaker_regret", "fig1", "matching_pennies".
Game builtin_game(const std::string& name);
std::vector<std::string> builtin_game_names();

// Coordination game with primary/secondary/safety learner actions.
// b_u holds 1-based primary indices and must be nonempty.
Game separation_family(int m, const std::vector<int>& b_u);

// Independent uniform [-eps, eps] noise on every entry of both matrices,
// realized on the dyadic grid of 2^40 steps so exact LPs still apply.
// Deterministic per seed; eps = 0 returns the game unchanged.
Game perturb(const Game& g, const Rational& eps, std::uint64_t seed);

// Entries drawn uniformly from {lo, ..., hi}; labels a1.., b1..
Game random_integer_game(int m, int n, long lo, long hi, std::uint64_t seed);

// --- Deviation sets -------------------------------------------------------

enum class DeviationKind { none, external, internal, dominated_swapping, custom };

const char* to_string(DeviationKind k);
DeviationKind deviation_kind_from_string(const std::string& s);

// A finite set of row-stochastic K x K deviation matrices for one player.
// Enumeration order is fixed: external by target index ascending; internal by
// (i, j) lexicographic; dominated_swapping by (j, k) lexicographic.
struct DeviationSet {
  Player player = Player::A;
  DeviationKind kind = DeviationKind::none;
  int dim = 0;
  std::vector<RatMat> matrices;
};

DeviationSet make_deviation_set(const Game& g, Player player, DeviationKind kind,
                                const std::vector<RatMat>* custom = nullptr);

// --- Structural analysis --------------------------------------------------

// All exact argmax responses (ties kept) for `player` against the opponent's
// mixed strategy.
std::vector<int> best_response_set(const Game& g, Player player, const RatVec& opponent_mixed);

// D(G): actions of `player` that are a best response to no opponent mixed
// strategy (weak-best-response LP infeasible).
std::vector<int> dominated_actions(const Game& g, Player player = Player::B);

// All cells (i, j) that are mutual weak best responses.
std::vector<std::pair<int, int>> pure_nash(const Game& g);

enum class Inducibility { strictly_inducible, never_best_response, violating };

struct ActionInducibility {
  Inducibility cls = Inducibility::violating;
  Rational margin;   // optimum of the max-min best-response-margin LP
  RatVec witness;    // opponent mixed strategy attaining the margin
};

struct UniqueStackReport {
  std::vector<ActionInducibility> actions_a;  // indexed by player A's actions
  std::vector<ActionInducibility> actions_b;
  bool ok = false;  // no action of either player is violating
};

// Classification of every action per the unique-inducibility condition:
// either some opponent strategy makes it the unique best response, or it is
// never a (weak) best response at all.
UniqueStackReport check_unique_stack_assumption(const Game& g);

}  // namespace gamelab
