#include "gamelab/trajectory.hpp"

#include <stdexcept>

namespace gamelab {

const char* to_string(PlayMode m) { return m == PlayMode::expected ? "expected" : "sampled"; }

PlayMode play_mode_from_string(const std::string& s) {
  if (s == "expected") return PlayMode::expected;
  if (s == "sampled") return PlayMode::sampled;
  throw std::invalid_argument("unknown play mode '" + s + "'");
}

void Trajectory::append(const Game& g, TrajectoryStep step) {
  if (steps.empty()) {
    m = g.m;
    n = g.n;
    cum_rewards_a.assign(m, 0.0);
    cum_rewards_b.assign(n, 0.0);
    play_counts_a.assign(m, 0.0);
    play_counts_b.assign(n, 0.0);
  }
  auto ra = observed_rewards(g, Player::A, step);
  auto rb = observed_rewards(g, Player::B, step);
  for (int i = 0; i < m; ++i) cum_rewards_a[i] += ra[i];
  for (int j = 0; j < n; ++j) cum_rewards_b[j] += rb[j];
  if (mode == PlayMode::sampled) {
    play_counts_a[step.i] += 1.0;
    play_counts_b[step.j] += 1.0;
  } else {
    for (int i = 0; i < m; ++i) play_counts_a[i] += step.p[i];
    for (int j = 0; j < n; ++j) play_counts_b[j] += step.q[j];
  }
  steps.push_back(std::move(step));
}

void Trajectory::recompute_tallies(const Game& g) {
  auto saved = std::move(steps);
  steps.clear();
  for (auto& s : saved) append(g, std::move(s));
}

double Trajectory::total_reward(Player p) const {
  double acc = 0;
  for (const auto& s : steps) acc += (p == Player::A ? s.rew_a : s.rew_b);
  return acc;
}

double Trajectory::average_reward(Player p) const {
  return steps.empty() ? 0.0 : total_reward(p) / static_cast<double>(steps.size());
}

std::vector<double> observed_rewards(const Game& g, Player p, const TrajectoryStep& step) {
  const RatMat& u = g.utility(p);
  if (p == Player::A) {
    std::vector<double> out(g.m, 0.0);
    if (step.j >= 0) {
      for (int i = 0; i < g.m; ++i) out[i] = u[i][step.j].to_double();
    } else {
      for (int i = 0; i < g.m; ++i)
        for (int j = 0; j < g.n; ++j) out[i] += u[i][j].to_double() * step.q[j];
    }
    return out;
  }
  std::vector<double> out(g.n, 0.0);
  if (step.i >= 0) {
    for (int j = 0; j < g.n; ++j) out[j] = u[step.i][j].to_double();
  } else {
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.m; ++i) out[j] += u[i][j].to_double() * step.p[i];
  }
  return out;
}

std::vector<std::vector<double>> sigma_hat(const Trajectory& traj) {
  std::vector<std::vector<double>> h(traj.m, std::vector<double>(traj.n, 0.0));
  if (traj.steps.empty()) return h;
  const double w = 1.0 / static_cast<double>(traj.steps.size());
  for (const auto& s : traj.steps) {
    if (traj.mode == PlayMode::sampled) {
      h[s.i][s.j] += w;
    } else {
      for (int i = 0; i < traj.m; ++i) {
        if (s.p[i] == 0.0) continue;
        for (int j = 0; j < traj.n; ++j) h[i][j] += w * s.p[i] * s.q[j];
      }
    }
  }
  return h;
}

namespace {

void check_dev(const Trajectory& traj, const Game& g, Player player, const DeviationSet& dev) {
  if (traj.steps.empty()) throw std::invalid_argument("regret: empty trajectory");
  if (traj.m != g.m || traj.n != g.n)
    throw std::invalid_argument("regret: trajectory/game shape mismatch");
  if (dev.player != player || dev.dim != g.actions(player))
    throw std::invalid_argument("regret: deviation set does not match player/game");
}

// Gain matrix of a deviation: entry (i, j) is the per-round reward change
// when the joint play puts mass on cell (i, j).
std::vector<std::vector<double>> gain_matrix(const Game& g, Player player, const RatMat& f) {
  std::vector<std::vector<double>> gain(g.m, std::vector<double>(g.n, 0.0));
  for (int i = 0; i < g.m; ++i) {
    for (int j = 0; j < g.n; ++j) {
      Rational swapped;
      if (player == Player::A) {
        for (int k = 0; k < g.m; ++k)
          if (!f[i][k].is_zero()) swapped += f[i][k] * g.ua(k, j);
        gain[i][j] = (swapped - g.ua(i, j)).to_double();
      } else {
        for (int k = 0; k < g.n; ++k)
          if (!f[j][k].is_zero()) swapped += f[j][k] * g.ub(i, k);
        gain[i][j] = (swapped - g.ub(i, j)).to_double();
      }
    }
  }
  return gain;
}

double step_gain(const std::vector<std::vector<double>>& gain, const Trajectory& traj,
                 const TrajectoryStep& s) {
  if (traj.mode == PlayMode::sampled) return gain[s.i][s.j];
  double acc = 0;
  for (int i = 0; i < traj.m; ++i) {
    if (s.p[i] == 0.0) continue;
    for (int j = 0; j < traj.n; ++j) acc += s.p[i] * s.q[j] * gain[i][j];
  }
  return acc;
}

}  // namespace

RegretReport phi_regret(const Trajectory& traj, const Game& g, Player player,
                        const DeviationSet& dev) {
  check_dev(traj, g, player, dev);
  RegretReport rep;
  rep.player = player;
  rep.kind = dev.kind;
  if (dev.matrices.empty()) return rep;  // empty comparator set: regret 0

  // Cumulative joint-play weights; each deviation then reduces to an inner
  // product with its gain matrix.
  std::vector<std::vector<double>> h(g.m, std::vector<double>(g.n, 0.0));
  for (const auto& s : traj.steps) {
    if (traj.mode == PlayMode::sampled) {
      h[s.i][s.j] += 1.0;
    } else {
      for (int i = 0; i < g.m; ++i) {
        if (s.p[i] == 0.0) continue;
        for (int j = 0; j < g.n; ++j) h[i][j] += s.p[i] * s.q[j];
      }
    }
  }
  bool first = true;
  for (size_t f = 0; f < dev.matrices.size(); ++f) {
    auto gain = gain_matrix(g, player, dev.matrices[f]);
    double total = 0;
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.n; ++j) total += h[i][j] * gain[i][j];
    if (first || total > rep.value) {
      rep.value = total;
      rep.best_index = static_cast<int>(f);
      first = false;
    }
  }
  return rep;
}

RegretReport adaptive_phi_regret(const Trajectory& traj, const Game& g, Player player,
                                 const DeviationSet& dev) {
  check_dev(traj, g, player, dev);
  RegretReport rep;
  rep.player = player;
  rep.kind = dev.kind;
  if (dev.matrices.empty()) return rep;

  const long t_max = traj.rounds();
  bool first = true;
  for (size_t f = 0; f < dev.matrices.size(); ++f) {
    auto gain = gain_matrix(g, player, dev.matrices[f]);
    // Maximum-sum window of the per-round gain sequence; equals the
    // enumeration over all O(T^2) windows.
    double best = 0, run = 0;
    long best_r = 1, best_s = 1, run_r = 1;
    bool have = false;
    for (long t = 1; t <= t_max; ++t) {
      double gt = step_gain(gain, traj, traj.steps[t - 1]);
      if (!have || run <= 0) {
        run = gt;
        run_r = t;
        have = true;
      } else {
        run += gt;
      }
      if (t == 1 || run > best) {
        best = run;
        best_r = run_r;
        best_s = t;
      }
    }
    if (first || best > rep.value) {
      rep.value = best;
      rep.best_index = static_cast<int>(f);
      rep.window_start = best_r;
      rep.window_end = best_s;
      first = false;
    }
  }
  return rep;
}

}  // namespace gamelab
