#pragma once

#include <cstdint>
#include <vector>

#include "gamelab/game.hpp"

namespace gamelab {

enum class PlayMode { expected, sampled };

const char* to_string(PlayMode m);
PlayMode play_mode_from_string(const std::string& s);

struct TrajectoryStep {
  std::vector<double> p;  // optimizer mixed strategy, length M
  std::vector<double> q;  // learner mixed strategy, length N
  int i = -1;             // realized actions; -1 in expected mode
  int j = -1;
  double rew_a = 0;       // realized (sampled) or expected (expected) rewards
  double rew_b = 0;
};

// Per-round record of repeated play plus running tallies. The tallies are
// maintained incrementally by whoever builds the trajectory and can be
// recomputed from the steps (recompute_tallies).
struct Trajectory {
  PlayMode mode = PlayMode::expected;
  std::uint64_t seed = 0;
  int m = 0;
  int n = 0;
  std::vector<TrajectoryStep> steps;
  std::vector<double> cum_rewards_a;  // per-action cumulative observed rewards
  std::vector<double> cum_rewards_b;
  std::vector<double> play_counts_a;  // realized counts (sampled) / probability mass (expected)
  std::vector<double> play_counts_b;

  long rounds() const { return static_cast<long>(steps.size()); }
  void append(const Game& g, TrajectoryStep step);
  void recompute_tallies(const Game& g);

  double total_reward(Player p) const;
  double average_reward(Player p) const;
};

// Per-round observed reward vector for one player (what a full-information
// learner sees): u(., b_j) in sampled mode, u(., q_t) in expected mode.
std::vector<double> observed_rewards(const Game& g, Player p, const TrajectoryStep& step);

// Time-averaged joint distribution of play: empirical counts in sampled mode,
// average of the per-round product distributions in expected mode.
std::vector<std::vector<double>> sigma_hat(const Trajectory& traj);

struct RegretReport {
  Player player = Player::A;
  DeviationKind kind = DeviationKind::none;
  double value = 0;
  int best_index = -1;     // argmax deviation matrix, -1 when the set is empty
  long window_start = 0;   // adaptive only; 1-based inclusive
  long window_end = 0;
};

// Cumulative Phi-regret over the full horizon: max over the deviation set of
// the total gain from rewriting the player's own play.
RegretReport phi_regret(const Trajectory& traj, const Game& g, Player player,
                        const DeviationSet& dev);

// Supremum of Phi-regret over all contiguous windows [r, s].
RegretReport adaptive_phi_regret(const Trajectory& traj, const Game& g, Player player,
                                 const DeviationSet& dev);

}  // namespace gamelab
