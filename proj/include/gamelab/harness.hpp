#pragma once

#include <json.hpp>

#include "gamelab/protocols.hpp"
#include "gamelab/serialization.hpp"

namespace gamelab {

// Game source DSL:
//   builtin:<name> | file:<path> | family:<M>:<j,k,...> |
//   random:<MxN>:<seed>[:<lo>..<hi>]
Game resolve_game(const std::string& source);

// Learner DSL: "<kind>[,key=value...]". Keys: eta, gamma, bound, t_burn,
// restart_window, strategy=p1|p2|..., inner=<kind>, second=<kind>.
LearnerConfig parse_learner_spec(const std::string& spec, double default_bound);

struct ExperimentSpec {
  std::string game = "builtin:g1";
  std::string perturb_eps;  // exact rational, empty = none
  std::uint64_t perturb_seed = 0;
  std::string learner_a = "mwu";
  std::string learner_b = "mwu";
  std::string pair;  // "" | "exploit_noregret"
  long rounds = 1000;
  PlayMode mode = PlayMode::expected;
  std::uint64_t seed = 1;
  int repetitions = 1;
  std::string trace_path;
  std::string report_path;

  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RegretRow {
  Player player = Player::A;
  DeviationKind kind = DeviationKind::external;
  double value = 0;
};

struct RunReport {
  int repetition = 0;
  std::uint64_t seed = 0;
  std::string game_hash;
  double avg_reward_a = 0;
  double avg_reward_b = 0;
  std::vector<RegretRow> regrets;         // external + internal, both players
  double eq_violation_ee = 0;             // sigma_hat under (external, external)
  double eq_violation_ii = 0;             // sigma_hat under (internal, internal)
  nlohmann::json protocol;                // endpoint metrics when a protocol ran

  nlohmann::json to_json() const;
};

// Recomputes the report's reward/regret metrics from a trajectory.
RunReport report_from_trajectory(const Game& g, const Trajectory& traj);

RunReport run_experiment(const ExperimentSpec& spec, int repetition = 0);

// Fans repetitions out across workers (env GAMELAB_WORKERS, default hardware
// concurrency); repetition k runs with seed spec.seed + k.
std::vector<RunReport> run_repetitions(const ExperimentSpec& spec);

struct ReproResult {
  std::string name;
  bool pass = false;
  std::vector<std::string> lines;
  double seconds = 0;
};

// Named reproduction suites, one per acceptance check ("all" runs every one).
std::vector<std::string> reproduction_names();
ReproResult reproduce(const std::string& name);

}  // namespace gamelab
