#include "gamelab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gamelab {

JointDistribution JointDistribution::from_exact(RatMat p) {
  JointDistribution d;
  d.m = static_cast<int>(p.size());
  d.n = d.m > 0 ? static_cast<int>(p[0].size()) : 0;
  d.exact = true;
  d.p = std::move(p);
  d.validate();
  return d;
}

JointDistribution JointDistribution::from_float(std::vector<std::vector<double>> p) {
  JointDistribution d;
  d.m = static_cast<int>(p.size());
  d.n = d.m > 0 ? static_cast<int>(p[0].size()) : 0;
  d.exact = false;
  d.pf = std::move(p);
  d.validate();
  return d;
}

void JointDistribution::validate() const {
  if (exact) {
    Rational sum;
    for (const auto& row : p)
      for (const auto& v : row) {
        if (v.sign() < 0) throw std::invalid_argument("JointDistribution: negative entry");
        sum += v;
      }
    if (sum != Rational(1))
      throw std::invalid_argument("JointDistribution: entries must sum to exactly 1");
  } else {
    double sum = 0;
    for (const auto& row : pf)
      for (double v : row) {
        if (v < 0) throw std::invalid_argument("JointDistribution: negative entry");
        sum += v;
      }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("JointDistribution: entries must sum to 1 within 1e-12");
  }
}

namespace {

void check_dims(const Game& g, const DeviationSet& dev_a, const DeviationSet& dev_b) {
  if (dev_a.player != Player::A || dev_a.dim != g.m)
    throw std::invalid_argument("equilibrium: dev_a does not match the game");
  if (dev_b.player != Player::B || dev_b.dim != g.n)
    throw std::invalid_argument("equilibrium: dev_b does not match the game");
}

// Coefficients of the no-gain inequality for one deviation:
//   sum_ij sigma_ij * (u(play) - u(deviated play)) >= 0.
RatVec deviation_row(const Game& g, Player player, const RatMat& f) {
  RatVec row(static_cast<size_t>(g.m) * g.n);
  for (int i = 0; i < g.m; ++i) {
    for (int j = 0; j < g.n; ++j) {
      Rational swapped;
      if (player == Player::A) {
        for (int k = 0; k < g.m; ++k)
          if (!f[i][k].is_zero()) swapped += f[i][k] * g.ua(k, j);
        row[i * g.n + j] = g.ua(i, j) - swapped;
      } else {
        for (int k = 0; k < g.n; ++k)
          if (!f[j][k].is_zero()) swapped += f[j][k] * g.ub(i, k);
        row[i * g.n + j] = g.ub(i, j) - swapped;
      }
    }
  }
  return row;
}

RatVec flatten(const RatMat& u, int m, int n) {
  RatVec out(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = u[i][j];
  return out;
}

JointDistribution witness_from_solution(const RatVec& x, int m, int n) {
  RatMat p = rat_matrix(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) p[i][j] = x[i * n + j];
  return JointDistribution::from_exact(std::move(p));
}

}  // namespace

LinearProgram equilibrium_polytope(const Game& g, const DeviationSet& dev_a,
                                   const DeviationSet& dev_b) {
  g.validate();
  check_dims(g, dev_a, dev_b);
  const int nv = g.m * g.n;
  LinearProgram lp = LinearProgram::make(nv);
  lp.add_constraint(RatVec(nv, Rational(1)), Relation::eq, Rational(1));
  for (const auto& f : dev_a.matrices)
    lp.add_constraint(deviation_row(g, Player::A, f), Relation::ge, Rational(0));
  for (const auto& f : dev_b.matrices)
    lp.add_constraint(deviation_row(g, Player::B, f), Relation::ge, Rational(0));
  return lp;
}

ValueResult equilibrium_value(const EquilibriumQuery& q) {
  LinearProgram lp = equilibrium_polytope(q.game, q.dev_a, q.dev_b);
  lp.sense = q.sense;
  lp.objective = flatten(q.game.utility(q.target), q.game.m, q.game.n);
  LpOutcome out = solve_lp(lp);
  if (out.status != LpStatus::optimal)
    throw std::logic_error(std::string("equilibrium_value: solver reported ") +
                           to_string(out.status));
  return {out.value, witness_from_solution(out.solution, q.game.m, q.game.n)};
}

StackelbergResult stackelberg(const Game& g, Player leader) {
  g.validate();
  const Player follower = opponent_of(leader);
  const int lead_k = g.actions(leader);
  const int foll_k = g.actions(follower);
  StackelbergResult res;
  res.per_follower_values.assign(foll_k, std::nullopt);
  for (int b = 0; b < foll_k; ++b) {
    LinearProgram lp = LinearProgram::make(lead_k);
    lp.add_constraint(RatVec(lead_k, Rational(1)), Relation::eq, Rational(1));
    for (int other = 0; other < foll_k; ++other) {
      if (other == b) continue;
      RatVec row(lead_k);
      for (int i = 0; i < lead_k; ++i) {
        // Follower must weakly prefer b over `other` against the commitment.
        row[i] = (leader == Player::A) ? g.ub(i, b) - g.ub(i, other)
                                       : g.ua(b, i) - g.ua(other, i);
      }
      lp.add_constraint(std::move(row), Relation::ge, Rational(0));
    }
    for (int i = 0; i < lead_k; ++i)
      lp.objective[i] = (leader == Player::A) ? g.ua(i, b) : g.ub(b, i);
    LpOutcome out = solve_lp(lp);
    if (out.status != LpStatus::optimal) continue;  // b is not weakly inducible
    res.per_follower_values[b] = out.value;
    if (res.follower_action < 0 || out.value > res.value) {
      res.value = out.value;
      res.leader_mixed = out.solution;
      res.follower_action = b;
    }
  }
  if (res.follower_action < 0)
    throw std::logic_error("stackelberg: no follower action is inducible");
  return res;
}

RatVec strict_stackelberg_strategy(const Game& g, Player leader, const Rational& eps,
                                   bool* assumption_ok) {
  if (eps.sign() < 0 || eps > Rational(1))
    throw std::invalid_argument("strict_stackelberg_strategy: eps must lie in [0, 1]");
  StackelbergResult st = stackelberg(g, leader);
  UniqueStackReport rep = check_unique_stack_assumption(g);
  const auto& entry = (leader == Player::A) ? rep.actions_b[st.follower_action]
                                            : rep.actions_a[st.follower_action];
  bool ok = entry.cls == Inducibility::strictly_inducible;
  if (assumption_ok != nullptr) *assumption_ok = ok;
  if (!ok || eps.is_zero()) return st.leader_mixed;
  RatVec out(st.leader_mixed.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = (Rational(1) - eps) * st.leader_mixed[i] + eps * entry.witness[i];
  return out;
}

EquilibriumCheck verify_approx_equilibrium(const Game& g, const JointDistribution& sigma,
                                           const DeviationSet& dev_a, const DeviationSet& dev_b,
                                           double eps) {
  check_dims(g, dev_a, dev_b);
  sigma.validate();
  auto gain = [&](Player p, const RatMat& f) {
    RatVec row = deviation_row(g, p, f);
    double acc = 0;
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.n; ++j) acc -= row[i * g.n + j].to_double() * sigma.at_f(i, j);
    return acc;
  };
  EquilibriumCheck out;
  for (const auto& f : dev_a.matrices) out.max_violation_a = std::max(out.max_violation_a, gain(Player::A, f));
  for (const auto& f : dev_b.matrices) out.max_violation_b = std::max(out.max_violation_b, gain(Player::B, f));
  out.pass = out.max_violation_a <= eps && out.max_violation_b <= eps;
  return out;
}

ExactEquilibriumCheck verify_exact_equilibrium(const Game& g, const JointDistribution& sigma,
                                               const DeviationSet& dev_a,
                                               const DeviationSet& dev_b, const Rational& eps) {
  check_dims(g, dev_a, dev_b);
  if (!sigma.exact)
    throw std::invalid_argument("verify_exact_equilibrium: needs an exact distribution");
  sigma.validate();
  auto gain = [&](Player p, const RatMat& f) {
    RatVec row = deviation_row(g, p, f);
    Rational acc;
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.n; ++j) acc -= row[i * g.n + j] * sigma.p[i][j];
    return acc;
  };
  ExactEquilibriumCheck out;
  for (const auto& f : dev_a.matrices) {
    Rational v = gain(Player::A, f);
    if (v > out.max_violation_a) out.max_violation_a = v;
  }
  for (const auto& f : dev_b.matrices) {
    Rational v = gain(Player::B, f);
    if (v > out.max_violation_b) out.max_violation_b = v;
  }
  out.pass = out.max_violation_a <= eps && out.max_violation_b <= eps;
  return out;
}

MetagameReport metagame_check(const Game& g) {
  MetagameReport rep;
  rep.assumption_ok = check_unique_stack_assumption(g).ok;
  rep.stack_a = stackelberg(g, Player::A).value;
  rep.stack_b = stackelberg(g, Player::B).value;

  DeviationSet ia = make_deviation_set(g, Player::A, DeviationKind::internal);
  DeviationSet ib = make_deviation_set(g, Player::B, DeviationKind::internal);
  RatVec obj_a = flatten(g.u_a, g.m, g.n);
  RatVec obj_b = flatten(g.u_b, g.m, g.n);

  // Existence: a correlated equilibrium pinned to both Stackelberg values.
  LinearProgram pinned = equilibrium_polytope(g, ia, ib);
  pinned.add_constraint(obj_a, Relation::eq, rep.stack_a);
  pinned.add_constraint(obj_b, Relation::eq, rep.stack_b);
  LpOutcome feas = feasible_point(pinned);
  rep.exists_pair = feas.status == LpStatus::optimal;
  if (rep.exists_pair) rep.witness = witness_from_solution(feas.solution, g.m, g.n);

  // Universality: min and max of each player's utility over the CE polytope
  // both equal the Stackelberg value (four LPs).
  rep.all_pairs = true;
  for (Player target : {Player::A, Player::B}) {
    const Rational& want = target == Player::A ? rep.stack_a : rep.stack_b;
    for (LpSense sense : {LpSense::minimize, LpSense::maximize}) {
      LinearProgram lp = equilibrium_polytope(g, ia, ib);
      lp.sense = sense;
      lp.objective = target == Player::A ? obj_a : obj_b;
      LpOutcome out = solve_lp(lp);
      if (out.status != LpStatus::optimal)
        throw std::logic_error("metagame_check: CE polytope must be solvable");
      if (out.value != want) rep.all_pairs = false;
    }
  }
  return rep;
}

JointDistribution select_equilibrium(const Game& g, const DeviationSet& dev_a,
                                     const DeviationSet& dev_b, const RatMat& score) {
  if (static_cast<int>(score.size()) != g.m)
    throw std::invalid_argument("select_equilibrium: score matrix shape mismatch");
  for (const auto& row : score)
    if (static_cast<int>(row.size()) != g.n)
      throw std::invalid_argument("select_equilibrium: score matrix shape mismatch");
  LinearProgram lp = equilibrium_polytope(g, dev_a, dev_b);
  lp.objective = flatten(score, g.m, g.n);
  LpOutcome out = solve_lp(lp);
  if (out.status != LpStatus::optimal)
    throw std::logic_error("select_equilibrium: polytope must be nonempty");
  return witness_from_solution(out.solution, g.m, g.n);
}

}  // namespace gamelab
