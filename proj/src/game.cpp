#include "gamelab/game.hpp"

#include <algorithm>
#include <stdexcept>

#include "gamelab/linprog.hpp"

namespace gamelab {

const char* to_string(Player p) { return p == Player::A ? "A" : "B"; }

int SeparationMeta::safety_col(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == j || i < 0 || j >= m) throw std::out_of_range("safety_col: bad pair");
  // pairs (0,1), (0,2), ..., (0,m-1), (1,2), ...
  int offset = 0;
  for (int r = 0; r < i; ++r) offset += m - 1 - r;
  return 2 * m + offset + (j - i - 1);
}

bool SeparationMeta::is_undominated(int j) const {
  return std::find(b_u.begin(), b_u.end(), j) != b_u.end();
}

void Game::validate() const {
  if (m <= 0 || n <= 0) throw std::invalid_argument("Game: empty action set");
  auto check = [&](const RatMat& u, const char* which) {
    if (static_cast<int>(u.size()) != m)
      throw std::invalid_argument(std::string("Game: row count mismatch in ") + which);
    for (const auto& row : u) {
      if (static_cast<int>(row.size()) != n)
        throw std::invalid_argument(std::string("Game: column count mismatch in ") + which);
      for (const auto& v : row)
        if (v.abs() > utility_bound)
          throw std::invalid_argument(std::string("Game: entry exceeds utility bound in ") + which);
    }
  };
  check(u_a, "u_a");
  check(u_b, "u_b");
  if (!row_labels.empty() && static_cast<int>(row_labels.size()) != m)
    throw std::invalid_argument("Game: row label count mismatch");
  if (!col_labels.empty() && static_cast<int>(col_labels.size()) != n)
    throw std::invalid_argument("Game: column label count mismatch");
}

Rational Game::expected(Player p, const RatVec& alpha, const RatVec& beta) const {
  const RatMat& u = utility(p);
  Rational acc;
  for (int i = 0; i < m; ++i) {
    if (alpha[i].is_zero()) continue;
    Rational row;
    for (int j = 0; j < n; ++j) row += beta[j] * u[i][j];
    acc += alpha[i] * row;
  }
  return acc;
}

RatVec Game::payoff_vector(Player p, const RatVec& opponent_mixed) const {
  const RatMat& u = utility(p);
  if (p == Player::A) {
    RatVec out(m);
    for (int i = 0; i < m; ++i) out[i] = dot(u[i], opponent_mixed);
    return out;
  }
  RatVec out(n);
  for (int j = 0; j < n; ++j) {
    Rational acc;
    for (int i = 0; i < m; ++i) acc += opponent_mixed[i] * u[i][j];
    out[j] = acc;
  }
  return out;
}

namespace {

std::vector<std::string> default_labels(char prefix, int count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int k = 1; k <= count; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

RatMat int_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  RatMat out;
  for (const auto& r : rows) {
    RatVec row;
    for (long v : r) row.emplace_back(v);
    out.push_back(std::move(row));
  }
  return out;
}

// Bounded uniform integer draw via masked rejection; bit-exact across
// platforms, unlike std::uniform_int_distribution.
std::uint64_t uniform_below(std::uint64_t& state, std::uint64_t bound) {
  std::uint64_t mask = bound - 1;
  mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
  mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
  for (;;) {
    state = splitmix64(state);
    std::uint64_t v = state & mask;
    if (v < bound) return v;
  }
}

}  // namespace

Game make_game(RatMat u_a, RatMat u_b, std::vector<std::string> row_labels,
               std::vector<std::string> col_labels) {
  Game g;
  g.m = static_cast<int>(u_a.size());
  g.n = g.m > 0 ? static_cast<int>(u_a[0].size()) : 0;
  g.u_a = std::move(u_a);
  g.u_b = std::move(u_b);
  g.row_labels = row_labels.empty() ? default_labels('a', g.m) : std::move(row_labels);
  g.col_labels = col_labels.empty() ? default_labels('b', g.n) : std::move(col_labels);
  g.validate();
  return g;
}

Game builtin_game(const std::string& name) {
  if (name == "g1") {
    return make_game(int_matrix({{1, 0, 0, 0}, {1, 0, 0, 1}, {2, 2, 0, 2}, {0, 2, 0, 0}}),
                     int_matrix({{0, 2, 0, 0}, {1, 1, 1, 0}, {1, 0, 2, 0}, {1, 0, 0, 1}}));
  }
  if (name == "g2") {
    return make_game(int_matrix({{2, 0, 1, 0}, {2, 1, 1, 0}, {0, 2, 1, 2}, {2, 0, 2, 1}}),
                     int_matrix({{1, 0, 1, 2}, {0, 1, 2, 0}, {1, 0, 2, 0}, {0, 2, 1, 1}}));
  }
  if (name == "weaker_regret") {
    return make_game(int_matrix({{0, 0, 2}, {0, 0, 1}, {0, 1, 1}}),
                     int_matrix({{2, 1, 1}, {0, 2, 1}, {0, 0, 2}}));
  }
  if (name == "fig1") {
    return make_game(int_matrix({{1, 0, 3}, {0, 1, 0}}),
                     int_matrix({{1, 0, 0}, {0, 1, 0}}));
  }
  if (name == "matching_pennies") {
    return make_game(int_matrix({{1, -1}, {-1, 1}}), int_matrix({{-1, 1}, {1, -1}}));
  }
  throw std::invalid_argument("builtin_game: unknown name '" + name + "'");
}

std::vector<std::string> builtin_game_names() {
  return {"g1", "g2", "weaker_regret", "fig1", "matching_pennies"};
}

Game separation_family(int m, const std::vector<int>& b_u) {
  if (m < 1) throw std::invalid_argument("separation_family: need m >= 1");
  if (b_u.empty()) throw std::invalid_argument("separation_family: b_u must be nonempty");
  SeparationMeta meta;
  meta.m = m;
  for (int j : b_u) {
    if (j < 1 || j > m) throw std::invalid_argument("separation_family: b_u index out of range");
    meta.b_u.push_back(j - 1);
  }
  std::sort(meta.b_u.begin(), meta.b_u.end());
  meta.b_u.erase(std::unique(meta.b_u.begin(), meta.b_u.end()), meta.b_u.end());

  const int n = 2 * m + m * (m - 1) / 2;
  RatMat ua = rat_matrix(m, n), ub = rat_matrix(m, n);
  std::vector<std::string> cols(n);
  for (int j = 0; j < m; ++j) {
    ua[j][meta.primary_col(j)] = Rational(j + 1, m);
    cols[meta.primary_col(j)] = "b" + std::to_string(j + 1);
    cols[meta.secondary_col(j)] = "s" + std::to_string(j + 1);
    if (meta.is_undominated(j)) {
      ub[j][meta.primary_col(j)] = Rational(1);
    } else {
      ub[j][meta.secondary_col(j)] = Rational(1);
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      int c = meta.safety_col(i, j);
      ub[i][c] = Rational(2, 3);
      ub[j][c] = Rational(2, 3);
      cols[c] = "y" + std::to_string(i + 1) + std::to_string(j + 1);
    }
  }
  Game g = make_game(std::move(ua), std::move(ub), default_labels('a', m), std::move(cols));
  g.utility_bound = Rational(1);
  g.separation = meta;
  return g;
}

Game perturb(const Game& g, const Rational& eps, std::uint64_t seed) {
  if (eps.sign() < 0) throw std::invalid_argument("perturb: eps must be >= 0");
  if (eps.is_zero()) return g;
  Game out = g;
  std::uint64_t state = splitmix64(seed ^ 0x70657274ULL);
  const std::uint64_t half = 1ULL << 40;
  auto draw = [&]() {
    // k uniform in [0, 2^41]; delta = eps * (k - 2^40) / 2^40 in [-eps, eps].
    std::uint64_t k = uniform_below(state, 2 * half + 1);
    return eps * Rational(mpq_class(static_cast<long>(k) - static_cast<long>(half),
                                    static_cast<long>(half)));
  };
  for (auto* u : {&out.u_a, &out.u_b})
    for (auto& row : *u)
      for (auto& v : row) v += draw();
  out.utility_bound = g.utility_bound + eps;
  out.validate();
  return out;
}

Game random_integer_game(int m, int n, long lo, long hi, std::uint64_t seed) {
  if (m < 1 || n < 1 || lo > hi) throw std::invalid_argument("random_integer_game: bad shape");
  std::uint64_t state = splitmix64(seed ^ 0x67616d65ULL);
  auto entry = [&]() {
    return Rational(lo + static_cast<long>(uniform_below(state, hi - lo + 1)));
  };
  Game g;
  g.m = m;
  g.n = n;
  g.u_a = rat_matrix(m, n);
  g.u_b = rat_matrix(m, n);
  for (auto* u : {&g.u_a, &g.u_b})
    for (auto& row : *u)
      for (auto& v : row) v = entry();
  g.row_labels = default_labels('a', m);
  g.col_labels = default_labels('b', n);
  g.utility_bound = Rational(std::max({std::abs(lo), std::abs(hi), 3L}));
  g.validate();
  return g;
}

// --- Deviation sets -------------------------------------------------------

const char* to_string(DeviationKind k) {
  switch (k) {
    case DeviationKind::none: return "none";
    case DeviationKind::external: return "external";
    case DeviationKind::internal: return "internal";
    case DeviationKind::dominated_swapping: return "dominated_swapping";
    case DeviationKind::custom: return "custom";
  }
  return "?";
}

DeviationKind deviation_kind_from_string(const std::string& s) {
  if (s == "none" || s == "0" || s == "empty") return DeviationKind::none;
  if (s == "external" || s == "ext") return DeviationKind::external;
  if (s == "internal" || s == "int" || s == "swap") return DeviationKind::internal;
  if (s == "dominated_swapping" || s == "domswap") return DeviationKind::dominated_swapping;
  if (s == "custom") return DeviationKind::custom;
  throw std::invalid_argument("unknown deviation kind '" + s + "'");
}

namespace {

RatMat identity_matrix(int k) {
  RatMat out = rat_matrix(k, k);
  for (int i = 0; i < k; ++i) out[i][i] = Rational(1);
  return out;
}

void check_row_stochastic(const RatMat& mat, int k) {
  if (static_cast<int>(mat.size()) != k)
    throw std::invalid_argument("deviation matrix: wrong row count");
  for (const auto& row : mat) {
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("deviation matrix: wrong column count");
    Rational sum;
    for (const auto& v : row) {
      if (v.sign() < 0) throw std::invalid_argument("deviation matrix: negative entry");
      sum += v;
    }
    if (sum != Rational(1)) throw std::invalid_argument("deviation matrix: row sum != 1");
  }
}

}  // namespace

DeviationSet make_deviation_set(const Game& g, Player player, DeviationKind kind,
                                const std::vector<RatMat>* custom) {
  DeviationSet out;
  out.player = player;
  out.kind = kind;
  out.dim = g.actions(player);
  const int k = out.dim;
  switch (kind) {
    case DeviationKind::none:
      break;
    case DeviationKind::external:
      for (int target = 0; target < k; ++target) {
        RatMat mat = rat_matrix(k, k);
        for (int i = 0; i < k; ++i) mat[i][target] = Rational(1);
        out.matrices.push_back(std::move(mat));
      }
      break;
    case DeviationKind::internal:
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          if (i == j) continue;
          RatMat mat = identity_matrix(k);
          mat[i][i] = Rational(0);
          mat[i][j] = Rational(1);
          out.matrices.push_back(std::move(mat));
        }
      }
      break;
    case DeviationKind::dominated_swapping: {
      if (player != Player::B)
        throw std::invalid_argument("dominated_swapping deviations are defined for the learner");
      std::vector<int> dom = dominated_actions(g, Player::B);
      std::vector<bool> is_dom(k, false);
      for (int d : dom) is_dom[d] = true;
      // g_{jk}: dominated actions remap to b_k, everything else to b_j.
      for (int j = 0; j < k; ++j) {
        for (int target = 0; target < k; ++target) {
          RatMat mat = rat_matrix(k, k);
          for (int i = 0; i < k; ++i) mat[i][is_dom[i] ? target : j] = Rational(1);
          out.matrices.push_back(std::move(mat));
        }
      }
      break;
    }
    case DeviationKind::custom: {
      if (custom == nullptr)
        throw std::invalid_argument("custom deviation set requires matrices");
      for (const auto& mat : *custom) {
        check_row_stochastic(mat, k);
        out.matrices.push_back(mat);
      }
      break;
    }
  }
  return out;
}

// --- Structural analysis --------------------------------------------------

std::vector<int> best_response_set(const Game& g, Player player, const RatVec& opponent_mixed) {
  if (static_cast<int>(opponent_mixed.size()) != g.actions(opponent_of(player)))
    throw std::invalid_argument("best_response_set: mixed strategy has wrong length");
  Rational total;
  for (const auto& v : opponent_mixed) {
    if (v.sign() < 0) throw std::invalid_argument("best_response_set: negative probability");
    total += v;
  }
  if (total != Rational(1)) throw std::invalid_argument("best_response_set: probabilities must sum to 1");
  RatVec payoff = g.payoff_vector(player, opponent_mixed);
  Rational best = payoff[0];
  for (const auto& v : payoff)
    if (v > best) best = v;
  std::vector<int> out;
  for (size_t i = 0; i < payoff.size(); ++i)
    if (payoff[i] == best) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// LP over the opponent simplex: does any mixed strategy make `action` a weak
// best response? Margin variant maximizes the worst advantage over the other
// actions (free variable z).
LinearProgram best_response_margin_lp(const Game& g, Player player, int action) {
  const int opp = g.actions(opponent_of(player));
  const int own = g.actions(player);
  LinearProgram lp = LinearProgram::make(opp + 1);
  lp.nonneg[opp] = false;
  lp.objective[opp] = Rational(1);
  RatVec ones(opp + 1, Rational());
  for (int i = 0; i < opp; ++i) ones[i] = Rational(1);
  lp.add_constraint(ones, Relation::eq, Rational(1));
  for (int other = 0; other < own; ++other) {
    if (other == action) continue;
    RatVec row(opp + 1, Rational());
    for (int i = 0; i < opp; ++i) {
      row[i] = (player == Player::B) ? g.ub(i, action) - g.ub(i, other)
                                     : g.ua(action, i) - g.ua(other, i);
    }
    row[opp] = Rational(-1);
    lp.add_constraint(std::move(row), Relation::ge, Rational(0));
  }
  return lp;
}

}  // namespace

std::vector<int> dominated_actions(const Game& g, Player player) {
  std::vector<int> out;
  const int own = g.actions(player);
  const int opp = g.actions(opponent_of(player));
  for (int action = 0; action < own; ++action) {
    // Feasibility system: alpha in the opponent simplex making `action` a
    // weak best response.
    LinearProgram lp = LinearProgram::make(opp);
    lp.add_constraint(RatVec(opp, Rational(1)), Relation::eq, Rational(1));
    for (int other = 0; other < own; ++other) {
      if (other == action) continue;
      RatVec row(opp);
      for (int i = 0; i < opp; ++i) {
        row[i] = (player == Player::B) ? g.ub(i, action) - g.ub(i, other)
                                       : g.ua(action, i) - g.ua(other, i);
      }
      lp.add_constraint(std::move(row), Relation::ge, Rational(0));
    }
    if (feasible_point(lp).status == LpStatus::infeasible) out.push_back(action);
  }
  return out;
}

std::vector<std::pair<int, int>> pure_nash(const Game& g) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < g.m; ++i) {
    for (int j = 0; j < g.n; ++j) {
      bool a_ok = true, b_ok = true;
      for (int i2 = 0; i2 < g.m && a_ok; ++i2)
        if (g.ua(i2, j) > g.ua(i, j)) a_ok = false;
      for (int j2 = 0; j2 < g.n && b_ok; ++j2)
        if (g.ub(i, j2) > g.ub(i, j)) b_ok = false;
      if (a_ok && b_ok) out.emplace_back(i, j);
    }
  }
  return out;
}

UniqueStackReport check_unique_stack_assumption(const Game& g) {
  UniqueStackReport report;
  report.ok = true;
  auto classify = [&](Player player) {
    std::vector<ActionInducibility> rows;
    const int own = g.actions(player);
    const int opp = g.actions(opponent_of(player));
    for (int action = 0; action < own; ++action) {
      ActionInducibility entry;
      if (own == 1) {
        entry.cls = Inducibility::strictly_inducible;
        entry.margin = g.utility_bound;
        entry.witness.assign(opp, Rational(1, opp));
        rows.push_back(std::move(entry));
        continue;
      }
      LpOutcome res = solve_lp(best_response_margin_lp(g, player, action));
      if (res.status != LpStatus::optimal)
        throw std::logic_error("margin LP must be bounded and feasible");
      entry.margin = res.value;
      entry.witness.assign(res.solution.begin(), res.solution.begin() + opp);
      entry.cls = res.value.sign() > 0   ? Inducibility::strictly_inducible
                  : res.value.sign() < 0 ? Inducibility::never_best_response
                                         : Inducibility::violating;
      if (entry.cls == Inducibility::violating) report.ok = false;
      rows.push_back(std::move(entry));
    }
    return rows;
  };
  report.actions_a = classify(Player::A);
  report.actions_b = classify(Player::B);
  return report;
}

}  // namespace gamelab
