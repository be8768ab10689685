#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gamelab/equilibria.hpp"
#include "gamelab/game.hpp"
#include "gamelab/learners.hpp"
#include "gamelab/trajectory.hpp"

namespace gamelab {

// Game JSON: {"m": int, "n": int, "u_a": [[..]], "u_b": [[..]],
// "labels": {"rows": [...], "cols": [...]}} with rationals as "p/q" or
// integer strings. Separation-family metadata rides along when present.
nlohmann::json game_to_json(const Game& g);
Game game_from_json(const nlohmann::json& j);
void save_game(const Game& g, const std::string& path);
Game load_game(const std::string& path);

// Stable content hash of the canonical serialization (FNV-1a, hex).
std::string game_hash(const Game& g);

// Trajectory CSV: t, p_1..p_M, q_1..q_N, i_t, j_t, rew_A, rew_B. Realized
// actions are -1 in expected mode.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(std::istream& is, const Game& g, PlayMode mode,
                               std::uint64_t seed);
Trajectory load_trajectory_csv(const std::string& path, const Game& g, PlayMode mode,
                               std::uint64_t seed);

nlohmann::json learner_config_to_json(const LearnerConfig& cfg);
LearnerConfig learner_config_from_json(const nlohmann::json& j);

nlohmann::json joint_distribution_to_json(const JointDistribution& d);

}  // namespace gamelab
