#include "gamelab/serialization.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace gamelab {

namespace {

nlohmann::json matrix_to_json(const RatMat& u) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : u) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(v.str());
    rows.push_back(std::move(r));
  }
  return rows;
}

RatMat matrix_from_json(const nlohmann::json& j) {
  RatMat out;
  for (const auto& row : j) {
    RatVec r;
    for (const auto& v : row) {
      if (v.is_number_integer()) {
        r.emplace_back(static_cast<long>(v.get<long long>()));
      } else {
        r.push_back(Rational::parse(v.get<std::string>()));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

nlohmann::json game_to_json(const Game& g) {
  nlohmann::json j;
  j["m"] = g.m;
  j["n"] = g.n;
  j["u_a"] = matrix_to_json(g.u_a);
  j["u_b"] = matrix_to_json(g.u_b);
  j["labels"] = {{"rows", g.row_labels}, {"cols", g.col_labels}};
  j["utility_bound"] = g.utility_bound.str();
  if (g.separation) {
    nlohmann::json sep;
    sep["m"] = g.separation->m;
    nlohmann::json bu = nlohmann::json::array();
    for (int k : g.separation->b_u) bu.push_back(k + 1);  // 1-based on disk
    sep["b_u"] = std::move(bu);
    j["separation"] = std::move(sep);
  }
  return j;
}

Game game_from_json(const nlohmann::json& j) {
  Game g = make_game(matrix_from_json(j.at("u_a")), matrix_from_json(j.at("u_b")));
  if (j.contains("labels")) {
    const auto& labels = j.at("labels");
    if (labels.contains("rows")) g.row_labels = labels.at("rows").get<std::vector<std::string>>();
    if (labels.contains("cols")) g.col_labels = labels.at("cols").get<std::vector<std::string>>();
  }
  if (j.contains("utility_bound"))
    g.utility_bound = Rational::parse(j.at("utility_bound").get<std::string>());
  if (j.contains("separation")) {
    SeparationMeta meta;
    meta.m = j.at("separation").at("m").get<int>();
    for (const auto& k : j.at("separation").at("b_u")) meta.b_u.push_back(k.get<int>() - 1);
    g.separation = meta;
  }
  g.validate();
  return g;
}

void save_game(const Game& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_game: cannot open '" + path + "'");
  os << game_to_json(g).dump(2) << '\n';
}

Game load_game(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_game: cannot open '" + path + "'");
  nlohmann::json j;
  is >> j;
  return game_from_json(j);
}

std::string game_hash(const Game& g) {
  const std::string blob = game_to_json(g).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : blob) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << 't';
  for (int i = 1; i <= traj.m; ++i) os << ",p_" << i;
  for (int j = 1; j <= traj.n; ++j) os << ",q_" << j;
  os << ",i_t,j_t,rew_A,rew_B\n";
  os << std::setprecision(17);
  long t = 0;
  for (const auto& s : traj.steps) {
    os << ++t;
    for (double v : s.p) os << ',' << v;
    for (double v : s.q) os << ',' << v;
    os << ',' << s.i << ',' << s.j << ',' << s.rew_a << ',' << s.rew_b << '\n';
  }
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_trajectory_csv: cannot open '" + path + "'");
  write_trajectory_csv(traj, os);
}

Trajectory read_trajectory_csv(std::istream& is, const Game& g, PlayMode mode,
                               std::uint64_t seed) {
  Trajectory traj;
  traj.mode = mode;
  traj.seed = seed;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trajectory csv: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    auto next = [&]() {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("trajectory csv: short row");
      return cell;
    };
    next();  // t
    TrajectoryStep s;
    s.p.resize(g.m);
    s.q.resize(g.n);
    for (int i = 0; i < g.m; ++i) s.p[i] = std::stod(next());
    for (int j = 0; j < g.n; ++j) s.q[j] = std::stod(next());
    s.i = std::stoi(next());
    s.j = std::stoi(next());
    s.rew_a = std::stod(next());
    s.rew_b = std::stod(next());
    traj.append(g, std::move(s));
  }
  return traj;
}

Trajectory load_trajectory_csv(const std::string& path, const Game& g, PlayMode mode,
                               std::uint64_t seed) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_trajectory_csv: cannot open '" + path + "'");
  return read_trajectory_csv(is, g, mode, seed);
}

nlohmann::json learner_config_to_json(const LearnerConfig& cfg) {
  nlohmann::json j;
  j["kind"] = cfg.kind;
  if (cfg.eta > 0) j["eta"] = cfg.eta;
  if (cfg.gamma > 0) j["gamma"] = cfg.gamma;
  j["reward_bound"] = cfg.reward_bound;
  if (cfg.t_burn > 0) j["t_burn"] = cfg.t_burn;
  if (cfg.restart_window > 0) j["restart_window"] = cfg.restart_window;
  if (!cfg.fixed_strategy.empty()) j["fixed_strategy"] = cfg.fixed_strategy;
  if (cfg.inner) j["inner"] = learner_config_to_json(*cfg.inner);
  if (cfg.second) j["second"] = learner_config_to_json(*cfg.second);
  return j;
}

LearnerConfig learner_config_from_json(const nlohmann::json& j) {
  LearnerConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  if (j.contains("eta")) cfg.eta = j.at("eta").get<double>();
  if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
  if (j.contains("reward_bound")) cfg.reward_bound = j.at("reward_bound").get<double>();
  if (j.contains("t_burn")) cfg.t_burn = j.at("t_burn").get<long>();
  if (j.contains("restart_window")) cfg.restart_window = j.at("restart_window").get<long>();
  if (j.contains("fixed_strategy"))
    cfg.fixed_strategy = j.at("fixed_strategy").get<std::vector<double>>();
  if (j.contains("inner"))
    cfg.inner = std::make_shared<LearnerConfig>(learner_config_from_json(j.at("inner")));
  if (j.contains("second"))
    cfg.second = std::make_shared<LearnerConfig>(learner_config_from_json(j.at("second")));
  return cfg;
}

nlohmann::json joint_distribution_to_json(const JointDistribution& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < d.m; ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (int j = 0; j < d.n; ++j) {
      if (d.exact) {
        r.push_back(d.p[i][j].str());
      } else {
        r.push_back(d.pf[i][j]);
      }
    }
    rows.push_back(std::move(r));
  }
  nlohmann::json out;
  out["exact"] = d.exact;
  out["p"] = std::move(rows);
  return out;
}

}  // namespace gamelab
