#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gamelab/trajectory.hpp"

namespace gamelab {

// Full-information feedback for one round. `rewards` is the per-own-action
// payoff vector in raw game units; the opponent's realized action is present
// in sampled mode, their mixed strategy in expected mode.
struct Observation {
  std::vector<double> rewards;
  int opponent_action = -1;
  std::vector<double> opponent_mixed;
};

// Online learner state machine. act(t) must be deterministic given the init
// parameters and the observe history; all randomness flows through the seed.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual void init(int action_count, long horizon_hint, std::uint64_t seed) = 0;
  virtual std::vector<double> act(long t) = 0;
  virtual void observe(const Observation& obs) = 0;
  virtual std::string kind() const = 0;
};

struct LearnerConfig {
  // mwu | rmbd | ftl | br_oracle | fixed | composite | interval_restart_mwu |
  // swap_wrapper
  std::string kind = "mwu";
  double eta = 0;              // mwu learning rate; 0 = sqrt(ln n / T)
  double gamma = 0;            // rmbd rounding override; 0 = lemma schedule
  double reward_bound = 3;     // rescaling constant (declared utility bound)
  long t_burn = 0;             // composite: rounds played by the first learner
  long restart_window = 0;     // interval_restart_mwu: W
  double regret_exponent_c = 0.5;  // envelope exponent, used by bound checks
  std::vector<double> fixed_strategy;
  std::shared_ptr<LearnerConfig> inner;   // swap_wrapper / composite first
  std::shared_ptr<LearnerConfig> second;  // composite second

  static LearnerConfig of(std::string kind);
};

std::unique_ptr<Learner> make_learner(const LearnerConfig& cfg);

// Rounding width of the doubling scheme at epoch scale t with n actions:
// gamma = 2 ln(sqrt(t ln n)) / sqrt(t ln n), clamped at 0.
double rmbd_lemma_gamma(double t, int n);

// Rewards are normalized by the declared utility bound before accumulation;
// regret envelopes are stated on this scale. Games with nonnegative payoffs
// land exactly in [0, 1].
inline double rescale_reward(double r, double bound) { return r / bound; }

struct MeanBasedViolation {
  long round = 0;    // round t+1 whose strategy violated the implication
  int action = 0;    // trailing action played with probability > gamma
  int leader = 0;    // action whose cumulative reward it trailed
  double prob = 0;
};

// Checks the trajectory of `player` against the mean-based property: whenever
// an action's cumulative (rescaled) reward trails some other action's by more
// than gamma*T, it must be played with probability at most gamma next round.
std::vector<MeanBasedViolation> mean_based_audit(const Trajectory& traj, const Game& g,
                                                 Player player, double gamma);

}  // namespace gamelab
