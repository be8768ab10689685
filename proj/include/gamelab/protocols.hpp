#pragma once

#include <deque>
#include <memory>
#include <utility>

#include "gamelab/equilibria.hpp"
#include "gamelab/learners.hpp"

namespace gamelab {

// Repeated-play loop. Sampled mode draws pure actions from each strategy with
// a seeded RNG; expected mode records the product distributions and feeds
// expected reward vectors. A learner emitting an invalid distribution aborts
// with diagnostics.
Trajectory simulate(const Game& g, Learner& learner_a, Learner& learner_b, long rounds,
                    PlayMode mode, std::uint64_t seed);

// One schedule window of a targeted endpoint.
struct WindowRecord {
  long start_round = 0;  // 1-based global round of the first step
  long length = 0;
  std::vector<long> counts;  // per pure pair, lexicographic, after leftover fill
};

// l1 distance between the window's empirical pair distribution and psi.
double window_l1(const WindowRecord& w, const JointDistribution& psi);

// One endpoint of the targeted-equilibrium pair. While trusting, it plays a
// lexicographically ordered rounded schedule drawn from psi over windows whose
// length follows the floor of an accumulator Z (Z_1 = M*N, then
// Z += 1/(2 sqrt(t)) realized as a dyadic lower bound after the window ending
// at step t). Each observed departure of the opponent from the schedule
// counts as a violation; after t_distrust of them the endpoint plays its
// fallback learner for all remaining rounds.
class TargetedEndpoint : public Learner {
 public:
  TargetedEndpoint(const Game& g, Player side, const JointDistribution& psi,
                   LearnerConfig fallback, long t_distrust);  // t_distrust 0 = ceil(sqrt(T))

  void init(int action_count, long horizon_hint, std::uint64_t seed) override;
  std::vector<double> act(long t) override;
  void observe(const Observation& obs) override;
  std::string kind() const override { return "targeted_endpoint"; }

  const std::vector<WindowRecord>& windows() const { return windows_; }
  long violations() const { return violations_; }
  bool defected() const { return defected_; }
  long defect_round() const { return defect_round_; }  // 0 if never
  const JointDistribution& psi() const { return psi_; }

 private:
  void build_window();

  Game game_;
  Player side_;
  JointDistribution psi_;
  RatMat psi_exact_;
  LearnerConfig fallback_cfg_;
  std::unique_ptr<Learner> fallback_;
  long t_distrust_cfg_ = 0;

  Rational z_;
  long t_distrust_ = 0;
  long round_ = 0;  // rounds completed
  long violations_ = 0;
  bool defected_ = false;
  long defect_round_ = 0;
  std::vector<WindowRecord> windows_;
  std::vector<std::pair<int, int>> schedule_;  // current window, pure pairs
  size_t pos_ = 0;
};

std::pair<std::unique_ptr<TargetedEndpoint>, std::unique_ptr<TargetedEndpoint>> targeted_pair(
    const Game& g, const JointDistribution& psi, const DeviationSet& dev_a,
    const DeviationSet& dev_b, LearnerConfig fallback_a, LearnerConfig fallback_b,
    long t_distrust = 0);

// Optimal-(none, external) exploitation pair: player A's strategy plus the
// constructed no-external-regret learner for player B, both endpoints of the
// targeted pair at the optimal (none, external) equilibrium, with MWU
// fallbacks.
std::pair<std::unique_ptr<TargetedEndpoint>, std::unique_ptr<TargetedEndpoint>> exploit_noregret(
    const Game& g);

// Static commitment to the eps-strict Stackelberg strategy.
std::unique_ptr<Learner> stackelberg_commit(const Game& g, Player leader, double eps,
                                            bool* assumption_ok = nullptr);

// Probe-then-commit optimizer for separation-family games: plays each a_i
// until the primary or secondary response is observed t_star times in the
// window, then commits to the best confirmed primary forever.
class NoswapExploiter : public Learner {
 public:
  NoswapExploiter(const Game& g, double tau, long t_star);

  void init(int action_count, long horizon_hint, std::uint64_t seed) override;
  std::vector<double> act(long t) override;
  void observe(const Observation& obs) override;
  std::string kind() const override { return "noswap_exploiter"; }

  bool committed() const { return committed_; }
  int commit_action() const { return commit_action_; }       // 0-based
  bool fallback_commit() const { return fallback_commit_; }  // no primary confirmed
  long probe_rounds() const { return probe_rounds_; }
  const std::vector<long>& window_rounds() const { return window_rounds_; }
  const std::vector<bool>& identified() const { return identified_; }

 private:
  void advance_window();

  SeparationMeta meta_;
  double tau_ = 0;
  long t_star_ = 0;

  int probe_ = 0;
  long count_primary_ = 0;
  long count_secondary_ = 0;
  long current_window_ = 0;
  long probe_rounds_ = 0;
  bool committed_ = false;
  bool fallback_commit_ = false;
  int commit_action_ = -1;
  std::vector<bool> identified_;
  std::vector<long> window_rounds_;
};

std::unique_ptr<NoswapExploiter> noswap_exploiter(const Game& g, double tau, long t_star);

struct QueryConfig {
  double delta = 0.1;        // dominance threshold: 1 - delta of the window
  long window = 200;         // W
  long round_cap = 20000;    // per-query budget
  double grid_spacing = 0.1; // used by the grid sweep
  // When > 0, the dominance window may only close once the greedy frequency
  // base has stayed within this l1 distance of the target for a full window;
  // this makes the learner's answer reflect the current query rather than a
  // stale lock carried over from earlier play.
  double saturation = 0;
  enum class Mode { anytime, adaptive };
  Mode mode = Mode::anytime;
};

struct QueryOutcome {
  bool answered = false;
  int action = -1;
  long rounds = 0;
  std::vector<double> window_freq;  // learner-action frequencies over the last W rounds
};

// Simulates best-response queries against a live learner: greedily plays the
// own action whose play frequency is furthest below its target in q (global
// frequencies in anytime mode, frequencies since the previous query in
// adaptive mode) until one learner action occupies >= 1-delta of the last W
// rounds of the query. The learner persists across queries.
class QuerySession {
 public:
  QuerySession(const Game& g, Learner& learner, QueryConfig cfg, std::uint64_t seed);

  QueryOutcome query(const std::vector<double>& q);
  long total_rounds() const { return total_rounds_; }
  const std::vector<QueryOutcome>& log() const { return log_; }

 private:
  const Game& game_;
  Learner& learner_;
  QueryConfig cfg_;
  std::uint64_t rng_;
  long total_rounds_ = 0;
  std::vector<double> base_counts_;  // greedy frequency base
  std::deque<int> recent_;           // learner actions, current query only
  std::vector<QueryOutcome> log_;
};

// The u_A side of the game is all the sweep is allowed to look at; everything
// about u_B flows through the query session.
struct LeaderView {
  const RatMat* u_a = nullptr;
  int m = 0;
  int n = 0;
};

struct GridPoint {
  std::vector<double> alpha;
  QueryOutcome outcome;
  double value = 0;  // u_A(alpha, answer), when answered
};

struct GridSearchResult {
  std::vector<double> alpha;
  double value = 0;
  int best_response = -1;
  long total_rounds = 0;
  std::vector<GridPoint> log;
};

// Queries every grid point of the leader simplex at the configured spacing
// and returns the answered point maximizing u_A(alpha, observed response).
// Timed-out points are recorded in the log and skipped; throws only if no
// point answers.
GridSearchResult grid_stackelberg_learner(const LeaderView& view, QuerySession& session,
                                          double grid_spacing);

}  // namespace gamelab
