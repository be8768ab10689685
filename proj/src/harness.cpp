#include "gamelab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace gamelab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Game resolve_game(const std::string& source) {
  auto colon = source.find(':');
  const std::string head = source.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : source.substr(colon + 1);
  if (head == "builtin") return builtin_game(rest);
  if (head == "file") return load_game(rest);
  if (head == "family") {
    auto parts = split(rest, ':');
    if (parts.size() != 2) throw std::invalid_argument("family:<M>:<j,k,...> expected");
    std::vector<int> b_u;
    for (const auto& tok : split(parts[1], ',')) b_u.push_back(std::stoi(tok));
    return separation_family(std::stoi(parts[0]), b_u);
  }
  if (head == "random") {
    auto parts = split(rest, ':');
    if (parts.size() < 2) throw std::invalid_argument("random:<MxN>:<seed>[:<lo>..<hi>] expected");
    auto shape = split(parts[0], 'x');
    if (shape.size() != 2) throw std::invalid_argument("random game shape must be MxN");
    long lo = 0, hi = 2;
    if (parts.size() >= 3) {
      auto range = parts[2];
      auto dots = range.find("..");
      if (dots == std::string::npos) throw std::invalid_argument("random range must be lo..hi");
      lo = std::stol(range.substr(0, dots));
      hi = std::stol(range.substr(dots + 2));
    }
    return random_integer_game(std::stoi(shape[0]), std::stoi(shape[1]), lo, hi,
                               std::stoull(parts[1]));
  }
  throw std::invalid_argument("unknown game source '" + source + "'");
}

LearnerConfig parse_learner_spec(const std::string& spec, double default_bound) {
  auto parts = split(spec, ',');
  LearnerConfig cfg = LearnerConfig::of(parts[0]);
  cfg.reward_bound = default_bound;
  for (size_t k = 1; k < parts.size(); ++k) {
    auto eq = parts[k].find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("learner spec: expected key=value, got '" + parts[k] + "'");
    const std::string key = parts[k].substr(0, eq), val = parts[k].substr(eq + 1);
    if (key == "eta") {
      cfg.eta = std::stod(val);
    } else if (key == "gamma") {
      cfg.gamma = std::stod(val);
    } else if (key == "bound") {
      cfg.reward_bound = std::stod(val);
    } else if (key == "t_burn") {
      cfg.t_burn = std::stol(val);
    } else if (key == "restart_window") {
      cfg.restart_window = std::stol(val);
    } else if (key == "strategy") {
      cfg.fixed_strategy.clear();
      for (const auto& tok : split(val, '|'))
        cfg.fixed_strategy.push_back(Rational::parse(tok).to_double());
    } else if (key == "inner" || key == "first") {
      cfg.inner = std::make_shared<LearnerConfig>(LearnerConfig::of(val));
      cfg.inner->reward_bound = default_bound;
    } else if (key == "second") {
      cfg.second = std::make_shared<LearnerConfig>(LearnerConfig::of(val));
      cfg.second->reward_bound = default_bound;
    } else {
      throw std::invalid_argument("learner spec: unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  if (j.contains("game")) s.game = j.at("game").get<std::string>();
  if (j.contains("perturb_eps")) s.perturb_eps = j.at("perturb_eps").get<std::string>();
  if (j.contains("perturb_seed")) s.perturb_seed = j.at("perturb_seed").get<std::uint64_t>();
  if (j.contains("learner_a")) s.learner_a = j.at("learner_a").get<std::string>();
  if (j.contains("learner_b")) s.learner_b = j.at("learner_b").get<std::string>();
  if (j.contains("pair")) s.pair = j.at("pair").get<std::string>();
  if (j.contains("rounds")) s.rounds = j.at("rounds").get<long>();
  if (j.contains("mode")) s.mode = play_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("repetitions")) s.repetitions = j.at("repetitions").get<int>();
  if (j.contains("trace_path")) s.trace_path = j.at("trace_path").get<std::string>();
  if (j.contains("report_path")) s.report_path = j.at("report_path").get<std::string>();
  return s;
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["game"] = game;
  if (!perturb_eps.empty()) {
    j["perturb_eps"] = perturb_eps;
    j["perturb_seed"] = perturb_seed;
  }
  j["learner_a"] = learner_a;
  j["learner_b"] = learner_b;
  if (!pair.empty()) j["pair"] = pair;
  j["rounds"] = rounds;
  j["mode"] = to_string(mode);
  j["seed"] = seed;
  j["repetitions"] = repetitions;
  if (!trace_path.empty()) j["trace_path"] = trace_path;
  if (!report_path.empty()) j["report_path"] = report_path;
  return j;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["repetition"] = repetition;
  j["seed"] = seed;
  j["game_hash"] = game_hash;
  j["avg_reward_a"] = avg_reward_a;
  j["avg_reward_b"] = avg_reward_b;
  nlohmann::json regs = nlohmann::json::array();
  for (const auto& r : regrets) {
    regs.push_back({{"player", to_string(r.player)},
                    {"kind", to_string(r.kind)},
                    {"value", r.value}});
  }
  j["regrets"] = std::move(regs);
  j["eq_violation_ee"] = eq_violation_ee;
  j["eq_violation_ii"] = eq_violation_ii;
  if (!protocol.is_null()) j["protocol"] = protocol;
  return j;
}

RunReport report_from_trajectory(const Game& g, const Trajectory& traj) {
  RunReport rep;
  rep.game_hash = gamelab::game_hash(g);
  rep.seed = traj.seed;
  rep.avg_reward_a = traj.average_reward(Player::A);
  rep.avg_reward_b = traj.average_reward(Player::B);
  DeviationSet ea = make_deviation_set(g, Player::A, DeviationKind::external);
  DeviationSet eb = make_deviation_set(g, Player::B, DeviationKind::external);
  DeviationSet ia = make_deviation_set(g, Player::A, DeviationKind::internal);
  DeviationSet ib = make_deviation_set(g, Player::B, DeviationKind::internal);
  for (const auto* dev : {&ea, &ia}) {
    auto r = phi_regret(traj, g, Player::A, *dev);
    rep.regrets.push_back({Player::A, dev->kind, r.value});
  }
  for (const auto* dev : {&eb, &ib}) {
    auto r = phi_regret(traj, g, Player::B, *dev);
    rep.regrets.push_back({Player::B, dev->kind, r.value});
  }
  auto sigma = JointDistribution::from_float(sigma_hat(traj));
  auto ee = verify_approx_equilibrium(g, sigma, ea, eb, 0.0);
  auto ii = verify_approx_equilibrium(g, sigma, ia, ib, 0.0);
  rep.eq_violation_ee = std::max(ee.max_violation_a, ee.max_violation_b);
  rep.eq_violation_ii = std::max(ii.max_violation_a, ii.max_violation_b);
  return rep;
}

namespace {

std::unique_ptr<Learner> make_player(const Game& g, const std::string& spec, Player side) {
  const double bound = g.utility_bound.to_double();
  auto parts = split(spec, ',');
  if (parts[0] == "stackcommit") {
    double eps = 0.01;
    for (size_t k = 1; k < parts.size(); ++k) {
      auto eq = parts[k].find('=');
      if (eq != std::string::npos && parts[k].substr(0, eq) == "eps")
        eps = std::stod(parts[k].substr(eq + 1));
    }
    return stackelberg_commit(g, side, eps);
  }
  if (parts[0] == "noswap") {
    double tau = 100;
    long t_star = 0;
    for (size_t k = 1; k < parts.size(); ++k) {
      auto eq = parts[k].find('=');
      if (eq == std::string::npos) continue;
      const std::string key = parts[k].substr(0, eq), val = parts[k].substr(eq + 1);
      if (key == "tau") tau = std::stod(val);
      if (key == "t_star") t_star = std::stol(val);
    }
    if (t_star == 0) t_star = 2 * static_cast<long>(std::ceil(tau));
    return noswap_exploiter(g, tau, t_star);
  }
  return make_learner(parse_learner_spec(spec, bound));
}

}  // namespace

RunReport run_experiment(const ExperimentSpec& spec, int repetition) {
  Game g = resolve_game(spec.game);
  if (!spec.perturb_eps.empty())
    g = perturb(g, Rational::parse(spec.perturb_eps), spec.perturb_seed);
  const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(repetition);

  std::unique_ptr<Learner> a, b;
  TargetedEndpoint* ta = nullptr;
  TargetedEndpoint* tb = nullptr;
  if (spec.pair == "exploit_noregret") {
    auto pr = exploit_noregret(g);
    ta = pr.first.get();
    tb = pr.second.get();
    a = std::move(pr.first);
    b = std::move(pr.second);
  } else if (!spec.pair.empty()) {
    throw std::invalid_argument("unknown pair protocol '" + spec.pair + "'");
  } else {
    a = make_player(g, spec.learner_a, Player::A);
    b = make_player(g, spec.learner_b, Player::B);
  }

  Trajectory traj = simulate(g, *a, *b, spec.rounds, spec.mode, seed);
  RunReport rep = report_from_trajectory(g, traj);
  rep.repetition = repetition;
  rep.seed = seed;

  nlohmann::json proto;
  for (auto [endpoint, name] : {std::pair{ta, "endpoint_a"}, std::pair{tb, "endpoint_b"}}) {
    if (endpoint == nullptr) continue;
    proto[name] = {{"violations", endpoint->violations()},
                   {"defected", endpoint->defected()},
                   {"defect_round", endpoint->defect_round()},
                   {"windows", endpoint->windows().size()}};
  }
  if (auto* ex = dynamic_cast<NoswapExploiter*>(a.get())) {
    proto["exploiter"] = {{"committed", ex->committed()},
                          {"commit_action", ex->commit_action() + 1},
                          {"fallback_commit", ex->fallback_commit()},
                          {"probe_rounds", ex->probe_rounds()},
                          {"window_rounds", ex->window_rounds()}};
  }
  rep.protocol = std::move(proto);

  if (repetition == 0 && !spec.trace_path.empty()) save_trajectory_csv(traj, spec.trace_path);
  return rep;
}

std::vector<RunReport> run_repetitions(const ExperimentSpec& spec) {
  const int reps = std::max(1, spec.repetitions);
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAMELAB_WORKERS")) workers = std::atoi(env);
  workers = std::max(1, std::min(workers, reps));

  std::vector<RunReport> out(reps);
  if (workers == 1) {
    for (int k = 0; k < reps; ++k) out[k] = run_experiment(spec, k);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int k; (k = next.fetch_add(1)) < reps;) out[k] = run_experiment(spec, k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// --- Reproduction suites ----------------------------------------------------

namespace {

class Checks {
 public:
  void require(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    lines_.push_back(std::string(ok ? "  ok: " : "  FAIL: ") + what);
  }
  void note(const std::string& what) { lines_.push_back("  -- " + what); }
  bool pass() const { return pass_; }
  std::vector<std::string> take_lines() { return std::move(lines_); }

 private:
  bool pass_ = true;
  std::vector<std::string> lines_;
};

Rational game_value(const Game& g, DeviationKind ka, DeviationKind kb,
                    LpSense sense = LpSense::maximize, Player target = Player::A) {
  EquilibriumQuery q;
  q.game = g;
  q.dev_a = make_deviation_set(g, Player::A, ka);
  q.dev_b = make_deviation_set(g, Player::B, kb);
  q.target = target;
  q.sense = sense;
  return equilibrium_value(q).value;
}

void check_value(Checks& c, const Game& g, const char* label, DeviationKind ka,
                 DeviationKind kb, const Rational& want,
                 LpSense sense = LpSense::maximize) {
  Rational got = game_value(g, ka, kb, sense);
  c.require(got == want, std::string(label) + " = " + got.str() + " (want " + want.str() + ")");
}

void suite_value_chain_g1(Checks& c) {
  Game g = builtin_game("g1");
  check_value(c, g, "Val_A(none,external)", DeviationKind::none, DeviationKind::external,
              Rational(8, 5));
  check_value(c, g, "Val_A(none,internal)", DeviationKind::none, DeviationKind::internal,
              Rational(4, 3));
  check_value(c, g, "Val_A(external,external)", DeviationKind::external,
              DeviationKind::external, Rational(1));
  check_value(c, g, "Val_A(internal,internal)", DeviationKind::internal,
              DeviationKind::internal, Rational(0));
}

void suite_value_chain_g2(Checks& c) {
  Game g = builtin_game("g2");
  const Rational v0e(13, 7), vee(12, 7), v0i(5, 3), vii(4, 3);
  check_value(c, g, "Val_A(none,external)", DeviationKind::none, DeviationKind::external, v0e);
  check_value(c, g, "Val_A(external,external)", DeviationKind::external,
              DeviationKind::external, vee);
  check_value(c, g, "Val_A(none,internal)", DeviationKind::none, DeviationKind::internal, v0i);
  check_value(c, g, "Val_A(internal,internal)", DeviationKind::internal,
              DeviationKind::internal, vii);
  c.require(v0e > vee && vee > v0i && v0i > vii, "chain 13/7 > 12/7 > 5/3 > 4/3 is strict");
}

void suite_weaker_regret(Checks& c) {
  Game g = builtin_game("weaker_regret");
  check_value(c, g, "Val_A(internal,internal)", DeviationKind::internal,
              DeviationKind::internal, Rational(0));
  check_value(c, g, "MinVal_A(internal,internal)", DeviationKind::internal,
              DeviationKind::internal, Rational(0), LpSense::minimize);
  check_value(c, g, "MinVal_A(external,internal)", DeviationKind::external,
              DeviationKind::internal, Rational(0), LpSense::minimize);
  check_value(c, g, "Val_A(external,internal)", DeviationKind::external,
              DeviationKind::internal, Rational(1));
}

void suite_fig1_values(Checks& c) {
  Game g = builtin_game("fig1");
  EquilibriumQuery q;
  q.game = g;
  q.dev_a = make_deviation_set(g, Player::A, DeviationKind::none);
  q.dev_b = make_deviation_set(g, Player::B, DeviationKind::external);
  ValueResult v = equilibrium_value(q);
  c.require(v.value == Rational(2), "Val_A(none,external) = " + v.value.str() + " (want 2)");
  bool witness_ok = v.witness.p[0][2] == Rational(1, 2) && v.witness.p[1][1] == Rational(1, 2) &&
                    v.witness.p[0][0].is_zero() && v.witness.p[0][1].is_zero() &&
                    v.witness.p[1][0].is_zero() && v.witness.p[1][2].is_zero();
  c.require(witness_ok, "witness puts mass 1/2 on (a1,b3) and 1/2 on (a2,b2)");

  Rational v0i = game_value(g, DeviationKind::none, DeviationKind::internal);
  StackelbergResult st = stackelberg(g, Player::A);
  c.require(st.value == Rational(1), "Stack_A = " + st.value.str() + " (want 1)");
  c.require(st.value == v0i, "Stack_A equals Val_A(none,internal) exactly");

  auto dom = dominated_actions(g, Player::B);
  c.require(dom == std::vector<int>{2}, "dominated learner actions = {b3}");
}

void suite_stack_identity(Checks& c) {
  int checked = 0;
  bool all = true;
  for (int k = 0; k < 100; ++k) {
    const int dim = k < 50 ? 3 : 4;
    Game base = random_integer_game(dim, dim, 0, 2, 9000 + k);
    Game g = perturb(base, Rational(1, 100), 17000 + k);
    Rational stack = stackelberg(g, Player::A).value;
    Rational val = game_value(g, DeviationKind::none, DeviationKind::internal);
    if (stack != val) {
      all = false;
      c.require(false, "game " + std::to_string(k) + ": Stack_A " + stack.str() +
                           " != Val_A(none,internal) " + val.str());
    }
    ++checked;
  }
  c.require(all && checked == 100,
            "Stack_A = Val_A(none,internal) exactly on 100 perturbed 3x3/4x4 games");
}

void suite_targeted_pair(Checks& c) {
  Game g = builtin_game("fig1");
  const long rounds = 10000;
  EquilibriumQuery q;
  q.game = g;
  q.dev_a = make_deviation_set(g, Player::A, DeviationKind::none);
  q.dev_b = make_deviation_set(g, Player::B, DeviationKind::external);
  ValueResult opt = equilibrium_value(q);

  LearnerConfig mwu = LearnerConfig::of("mwu");
  mwu.reward_bound = g.utility_bound.to_double();
  auto [ea, eb] = targeted_pair(g, opt.witness, q.dev_a, q.dev_b, mwu, mwu, 0);
  Trajectory traj = simulate(g, *ea, *eb, rounds, PlayMode::expected, 11);

  bool windows_ok = true;
  long max_window = 0;
  const double cells = static_cast<double>(g.m) * g.n;
  for (const auto& w : ea->windows()) {
    if (w.start_round + w.length - 1 > rounds) continue;  // partial final window
    max_window = std::max(max_window, w.length);
    if (window_l1(w, opt.witness) > cells / static_cast<double>(w.length) + 1e-12)
      windows_ok = false;
  }
  c.require(windows_ok, "every complete window satisfies ||empirical - psi||_1 <= MN/Length");
  c.require(ea->violations() == 0 && eb->violations() == 0 && !ea->defected(),
            "cooperating endpoints never defect");
  std::ostringstream avg;
  avg << traj.average_reward(Player::A);
  c.require(traj.average_reward(Player::A) >= 2.0 - 0.05,
            "avg reward_A = " + avg.str() + " (want >= 1.95)");

  // Hostile branch: a scripted fixed action against a fresh learner endpoint.
  auto pair2 = targeted_pair(g, opt.witness, q.dev_a, q.dev_b, mwu, mwu, 0);
  LearnerConfig hostile = LearnerConfig::of("fixed");
  hostile.fixed_strategy = {0.0, 1.0};
  auto adversary = make_learner(hostile);
  Trajectory traj2 = simulate(g, *adversary, *pair2.second, rounds, PlayMode::expected, 12);
  const long sqrt_t = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(rounds))));
  c.require(pair2.second->defected(), "learner endpoint defects against the hostile script");
  c.require(pair2.second->defect_round() <= sqrt_t * 6 + 1,
            "defection happens within ceil(sqrt(T)) * (first window length) + 1 rounds");

  long hostile_max_window = 0;
  for (const auto& w : pair2.second->windows()) hostile_max_window = std::max(hostile_max_window, w.length);
  DeviationSet ext_b = make_deviation_set(g, Player::B, DeviationKind::external);
  double regret = phi_regret(traj2, g, Player::B, ext_b).value;
  const double bound = g.utility_bound.to_double();
  // The fallback's post-rescaling envelope, mapped back to raw game units.
  double envelope = 2.0 * std::sqrt(static_cast<double>(rounds) * std::log(g.n)) * bound;
  double budget = envelope + static_cast<double>(sqrt_t) * bound +
                  static_cast<double>(hostile_max_window);
  std::ostringstream line;
  line << "hostile-branch external regret " << regret << " <= " << budget;
  c.require(regret <= budget, line.str());
}

void suite_pure_nash_necessity(Checks& c) {
  int no_pure = 0, agree = 0;
  for (int k = 0; k < 50; ++k) {
    Game base = random_integer_game(3, 3, 0, 2, 23000 + k);
    Game g = perturb(base, Rational(1, 100), 29000 + k);
    if (!pure_nash(g).empty()) continue;
    ++no_pure;
    MetagameReport rep = metagame_check(g);
    if (!rep.exists_pair) ++agree;
  }
  c.note("games without a pure Nash equilibrium: " + std::to_string(no_pure) + "/50");
  c.require(no_pure >= 5, "enough pure-Nash-free instances for a meaningful check");
  c.require(agree == no_pure, "exists_pair = false on every pure-Nash-free instance (" +
                                  std::to_string(agree) + "/" + std::to_string(no_pure) + ")");
}

LearnerConfig ftl_rmbd_composite(double bound, long t_burn) {
  LearnerConfig cfg = LearnerConfig::of("composite");
  cfg.t_burn = t_burn;
  cfg.reward_bound = bound;
  cfg.inner = std::make_shared<LearnerConfig>(LearnerConfig::of("ftl"));
  cfg.inner->reward_bound = bound;
  cfg.second = std::make_shared<LearnerConfig>(LearnerConfig::of("rmbd"));
  cfg.second->reward_bound = bound;
  return cfg;
}

void suite_meanbased_gap(Checks& c) {
  Game g = builtin_game("fig1");
  const long rounds = 1L << 16;
  const double bound = g.utility_bound.to_double();
  LearnerConfig mb = ftl_rmbd_composite(bound, 256);

  {
    auto commit = stackelberg_commit(g, Player::A, 0.01);
    auto learner = make_learner(mb);
    Trajectory traj = simulate(g, *commit, *learner, rounds, PlayMode::expected, 21);
    std::ostringstream line;
    line << "stackelberg_commit vs ftl+rmbd: avg reward_A = " << traj.average_reward(Player::A);
    c.require(traj.average_reward(Player::A) <= 1.1, line.str() + " (want <= 1.1)");
  }
  {
    auto exploit = exploit_noregret(g);
    auto learner = make_learner(mb);
    Trajectory traj = simulate(g, *exploit.first, *learner, rounds, PlayMode::expected, 22);
    std::ostringstream line;
    line << "adaptive exploiter vs ftl+rmbd: avg reward_A = " << traj.average_reward(Player::A);
    c.require(traj.average_reward(Player::A) <= 1.1, line.str() + " (want <= 1.1)");
  }
  {
    auto exploit = exploit_noregret(g);
    Trajectory traj =
        simulate(g, *exploit.first, *exploit.second, rounds, PlayMode::expected, 23);
    std::ostringstream line;
    line << "exploit_noregret pair: avg reward_A = " << traj.average_reward(Player::A);
    c.require(traj.average_reward(Player::A) >= 1.9, line.str() + " (want >= 1.9)");
  }
}

void suite_swap_vs_meanbased(Checks& c) {
  Game g = separation_family(4, {2, 4});
  const double bound = g.utility_bound.to_double();

  {  // (a) probe-and-commit against the swap wrapper
    const long rounds = 1L << 16;
    const double tau = std::sqrt(static_cast<double>(rounds));
    const long t_star = 2 * static_cast<long>(std::ceil(tau));
    const double budget = 20.0 * tau * 64.0;
    bool all_ok = true;
    for (int seed = 1; seed <= 30; ++seed) {
      auto exploiter = noswap_exploiter(g, tau, t_star);
      LearnerConfig wrapper = LearnerConfig::of("swap_wrapper");
      wrapper.reward_bound = bound;
      auto learner = make_learner(wrapper);
      Trajectory traj = simulate(g, *exploiter, *learner, rounds, PlayMode::sampled, seed);
      bool ok = exploiter->committed() && !exploiter->fallback_commit() &&
                exploiter->commit_action() == 3 &&
                static_cast<double>(exploiter->probe_rounds()) <= budget;
      double post = 0;
      const long probe = exploiter->probe_rounds();
      for (long t = probe; t < rounds; ++t) post += traj.steps[t].rew_a;
      post /= static_cast<double>(rounds - probe);
      ok = ok && post >= 0.95;
      if (!ok) {
        all_ok = false;
        std::ostringstream line;
        line << "seed " << seed << ": commit=" << exploiter->commit_action() + 1
             << " probe=" << probe << " post-commit avg=" << post;
        c.require(false, line.str());
      }
    }
    c.require(all_ok, "vs swap_wrapper: i*=4 identified within budget, post-commit avg >= 0.95, 30/30 seeds");
  }

  {  // (b) window growth against the mean-based composite
    const long rounds = 1L << 16;
    bool all_ok = true;
    double worst_ratio = 1e300;
    for (int seed = 1; seed <= 10; ++seed) {
      auto exploiter = noswap_exploiter(g, 200.0, 400);
      LearnerConfig mb = ftl_rmbd_composite(bound, 1024);
      auto learner = make_learner(mb);
      simulate(g, *exploiter, *learner, rounds, PlayMode::sampled, 100 + seed);
      const auto& w = exploiter->window_rounds();
      if (!exploiter->committed() || w.size() != 4) {
        all_ok = false;
        c.require(false, "seed " + std::to_string(seed) + ": probe did not finish (windows " +
                             std::to_string(w.size()) + ")");
        continue;
      }
      for (size_t i = 0; i + 1 < w.size(); ++i) {
        double ratio = static_cast<double>(w[i + 1]) / static_cast<double>(w[i]);
        worst_ratio = std::min(worst_ratio, ratio);
        if (ratio < 1.4) {
          all_ok = false;
          std::ostringstream line;
          line << "seed " << seed << ": window ratio w" << i + 2 << "/w" << i + 1 << " = "
               << ratio << " < 1.4 (windows";
          for (long v : w) line << ' ' << v;
          line << ")";
          c.require(false, line.str());
        }
      }
    }
    std::ostringstream line;
    line << "vs ftl+rmbd: rounds-to-observe grows by >= 1.4 per primary (worst ratio "
         << worst_ratio << "), 10/10 seeds";
    c.require(all_ok, line.str());
  }
}

// Reward streams for the envelope checks, all in [0, 1].
std::vector<double> stream_reward(const std::string& kind, int n, long t, std::uint64_t& rng) {
  std::vector<double> r(n, 0.0);
  if (kind == "gap") {
    r[0] = 1.0;
  } else if (kind == "blocks") {
    long len = 1, pos = t - 1;
    int b = 0;
    while (pos >= len) {
      pos -= len;
      len *= 2;
      ++b;
    }
    r[b % n] = 1.0;
  } else {  // random
    for (int k = 0; k < n; ++k) {
      rng = splitmix64(rng);
      r[k] = static_cast<double>(rng >> 11) * 0x1.0p-53;
    }
  }
  return r;
}

// Drives a learner on a raw reward stream and measures external regret on the
// learner's rescaled units at each requested checkpoint.
std::vector<double> stream_regret(Learner& learner, const std::string& stream, int n, long t_max,
                                  const std::vector<long>& checkpoints, double bound,
                                  std::uint64_t stream_seed) {
  std::vector<double> cum(n, 0.0);
  double earned = 0;
  std::uint64_t rng = splitmix64(stream_seed);
  std::vector<double> out;
  size_t next_cp = 0;
  for (long t = 1; t <= t_max; ++t) {
    auto p = learner.act(t);
    auto r = stream_reward(stream, n, t, rng);
    Observation obs;
    obs.rewards = r;
    learner.observe(obs);
    for (int k = 0; k < n; ++k) {
      double scaled = rescale_reward(r[k], bound);
      cum[k] += scaled;
      earned += p[k] * scaled;
    }
    if (next_cp < checkpoints.size() && t == checkpoints[next_cp]) {
      out.push_back(*std::max_element(cum.begin(), cum.end()) - earned);
      ++next_cp;
    }
  }
  return out;
}

void suite_regret_envelopes(Checks& c) {
  const std::vector<std::string> streams = {"gap", "blocks", "random"};
  const std::vector<int> ns = {2, 8};

  bool mwu_ok = true;
  double mwu_worst_slack = 1e300;
  for (const auto& stream : streams) {
    for (int n : ns) {
      for (long t = 1L << 10; t <= 1L << 16; t <<= 1) {
        LearnerConfig cfg = LearnerConfig::of("mwu");
        cfg.reward_bound = 1.0;
        auto learner = make_learner(cfg);
        learner->init(n, t, 7);
        double reg = stream_regret(*learner, stream, n, t, {t}, 1.0, 40 + n)[0];
        double env = 2.0 * std::sqrt(static_cast<double>(t) * std::log(n));
        mwu_worst_slack = std::min(mwu_worst_slack, env - reg);
        if (reg > env) {
          mwu_ok = false;
          c.require(false, "mwu " + stream + " n=" + std::to_string(n) +
                               " T=" + std::to_string(t) + ": regret " + std::to_string(reg) +
                               " > " + std::to_string(env));
        }
      }
    }
  }
  c.require(mwu_ok, "mwu external regret <= 2 sqrt(T ln n) on every stream and horizon");

  bool rmbd_ok = true;
  std::vector<long> cps;
  for (long t = 1L << 10; t <= 1L << 16; t <<= 1) cps.push_back(t);
  for (const auto& stream : streams) {
    for (int n : ns) {
      LearnerConfig cfg = LearnerConfig::of("rmbd");
      cfg.reward_bound = 1.0;
      auto learner = make_learner(cfg);
      learner->init(n, 1L << 16, 7);
      auto regs = stream_regret(*learner, stream, n, 1L << 16, cps, 1.0, 60 + n);
      for (size_t k = 0; k < cps.size(); ++k) {
        double env = 20.0 * n * std::sqrt(static_cast<double>(cps[k])) *
                     std::log(static_cast<double>(cps[k]));
        if (regs[k] > env) {
          rmbd_ok = false;
          c.require(false, "rmbd " + stream + " n=" + std::to_string(n) +
                               " t=" + std::to_string(cps[k]) + ": regret " +
                               std::to_string(regs[k]) + " > " + std::to_string(env));
        }
      }
    }
  }
  c.require(rmbd_ok, "rmbd anytime external regret <= 20 n sqrt(t) ln t at every checkpoint");

  // Mean-based audit of an RMBD trace at the lemma's gamma.
  Game g = builtin_game("fig1");
  LearnerConfig fixed = LearnerConfig::of("fixed");
  fixed.fixed_strategy = {1.0, 0.0};
  LearnerConfig rmbd = LearnerConfig::of("rmbd");
  rmbd.reward_bound = g.utility_bound.to_double();
  auto a = make_learner(fixed);
  auto b = make_learner(rmbd);
  Trajectory traj = simulate(g, *a, *b, 1L << 16, PlayMode::expected, 31);
  double gamma = rmbd_lemma_gamma(static_cast<double>(1L << 16), g.n);
  auto violations = mean_based_audit(traj, g, Player::B, gamma);
  c.require(violations.empty(), "rmbd mean-based audit passes at gamma = " +
                                    std::to_string(gamma) + " (" +
                                    std::to_string(violations.size()) + " violations)");
}

void suite_query_simulation(Checks& c) {
  const long horizon = 1L << 16;

  auto sweep_value = [&](const Game& g, const std::string& learner_kind, long cap,
                         std::uint64_t seed) {
    LearnerConfig cfg = LearnerConfig::of(learner_kind);
    cfg.reward_bound = g.utility_bound.to_double();
    auto learner = make_learner(cfg);
    learner->init(g.n, horizon, splitmix64(seed));
    QueryConfig qc;
    qc.round_cap = cap;
    QuerySession session(g, *learner, qc, seed);
    LeaderView view{&g.u_a, g.m, g.n};
    return grid_stackelberg_learner(view, session, 0.1).value;
  };

  {
    Game fig1 = builtin_game("fig1");
    double truth = stackelberg(fig1, Player::A).value.to_double();
    double v1 = sweep_value(fig1, "br_oracle", 2000, 51);
    double v2 = sweep_value(fig1, "swap_wrapper", 20000, 52);
    std::ostringstream line;
    line << "fig1 sweep: oracle " << v1 << ", swap_wrapper " << v2 << " (want >= "
         << truth - 0.1 << ")";
    c.require(v1 >= truth - 0.1 && v2 >= truth - 0.1, line.str());
  }
  {
    Game fam = separation_family(3, {3});
    double truth = stackelberg(fam, Player::A).value.to_double();
    double v1 = sweep_value(fam, "br_oracle", 2000, 53);
    double v2 = sweep_value(fam, "swap_wrapper", 10000, 54);
    std::ostringstream line;
    line << "family(3,{3}) sweep: oracle " << v1 << ", swap_wrapper " << v2 << " (want >= "
         << truth - 0.1 << ")";
    c.require(v1 >= truth - 0.1 && v2 >= truth - 0.1, line.str());
  }

  // Anytime-vs-adaptive round-count contrast on a fixed query sequence.
  Game g = builtin_game("fig1");
  const std::vector<std::vector<double>> queries = {
      {1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 0}};
  auto run_queries = [&](const LearnerConfig& cfg, QueryConfig::Mode mode,
                         std::uint64_t seed) {
    auto learner = make_learner(cfg);
    learner->init(g.n, horizon, splitmix64(seed));
    QueryConfig qc;
    qc.mode = mode;
    qc.window = 2000;
    qc.round_cap = 500000;
    qc.saturation = 0.5;  // answers must reflect the current query, not a stale lock
    QuerySession session(g, *learner, qc, seed);
    std::vector<long> rounds;
    for (const auto& q : queries) {
      auto out = session.query(q);
      rounds.push_back(out.answered ? out.rounds : -1);
    }
    return rounds;
  };

  LearnerConfig mwu = LearnerConfig::of("mwu");
  mwu.reward_bound = g.utility_bound.to_double();
  auto mwu_rounds = run_queries(mwu, QueryConfig::Mode::anytime, 61);

  LearnerConfig restart = LearnerConfig::of("interval_restart_mwu");
  restart.reward_bound = g.utility_bound.to_double();
  restart.restart_window = 256;
  restart.eta = 1.0;
  auto restart_rounds = run_queries(restart, QueryConfig::Mode::adaptive, 62);

  auto fmt = [](const std::vector<long>& v) {
    std::ostringstream os;
    for (long r : v) os << r << ' ';
    return os.str();
  };
  bool answered = true;
  for (long r : mwu_rounds) answered = answered && r > 0;
  for (long r : restart_rounds) answered = answered && r > 0;
  c.require(answered, "all ten queries answered (mwu: " + fmt(mwu_rounds) +
                          "| restart: " + fmt(restart_rounds) + ")");
  if (answered) {
    double grow = static_cast<double>(mwu_rounds[4]) / static_cast<double>(mwu_rounds[0]);
    double flat =
        static_cast<double>(restart_rounds[4]) / static_cast<double>(restart_rounds[0]);
    std::ostringstream line;
    line << "per-query growth: anytime mwu x" << grow << " (want >= 3), interval restart x"
         << flat << " (want <= 1.5)";
    c.require(grow >= 3.0 && flat <= 1.5, line.str());
  }
}

struct SuiteEntry {
  const char* name;
  void (*fn)(Checks&);
};

constexpr SuiteEntry kSuites[] = {
    {"value-chain-g1", suite_value_chain_g1},
    {"value-chain-g2", suite_value_chain_g2},
    {"weaker-regret", suite_weaker_regret},
    {"fig1-values", suite_fig1_values},
    {"stack-identity", suite_stack_identity},
    {"targeted-pair", suite_targeted_pair},
    {"pure-nash-necessity", suite_pure_nash_necessity},
    {"meanbased-gap", suite_meanbased_gap},
    {"swap-vs-meanbased", suite_swap_vs_meanbased},
    {"regret-envelopes", suite_regret_envelopes},
    {"query-simulation", suite_query_simulation},
};

}  // namespace

std::vector<std::string> reproduction_names() {
  std::vector<std::string> out;
  for (const auto& s : kSuites) out.push_back(s.name);
  return out;
}

ReproResult reproduce(const std::string& name) {
  if (name == "ge-seps") {
    // Both value chains together.
    auto start = std::chrono::steady_clock::now();
    Checks c;
    suite_value_chain_g1(c);
    suite_value_chain_g2(c);
    ReproResult res;
    res.name = name;
    res.pass = c.pass();
    res.lines = c.take_lines();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }
  for (const auto& s : kSuites) {
    if (name != s.name) continue;
    auto start = std::chrono::steady_clock::now();
    Checks c;
    s.fn(c);
    ReproResult res;
    res.name = name;
    res.pass = c.pass();
    res.lines = c.take_lines();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }
  throw std::invalid_argument("unknown reproduction suite '" + name + "'");
}

}  // namespace gamelab
