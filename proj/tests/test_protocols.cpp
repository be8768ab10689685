#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gamelab/protocols.hpp"

using namespace gamelab;

namespace {

JointDistribution optimal_unconstrained_external(const Game& g) {
  EquilibriumQuery q;
  q.game = g;
  q.dev_a = make_deviation_set(g, Player::A, DeviationKind::none);
  q.dev_b = make_deviation_set(g, Player::B, DeviationKind::external);
  q.target = Player::A;
  q.sense = LpSense::maximize;
  return equilibrium_value(q).witness;
}

// Echoes the secondary action of whatever row the optimizer just played;
// used to exercise the no-primary-confirmed fallback.
class SecondaryEcho : public Learner {
 public:
  explicit SecondaryEcho(SeparationMeta meta) : meta_(std::move(meta)) {}
  void init(int, long, std::uint64_t) override { last_ = 0; }
  std::vector<double> act(long) override {
    std::vector<double> p(2 * meta_.m + meta_.m * (meta_.m - 1) / 2, 0.0);
    p[meta_.secondary_col(last_)] = 1.0;
    return p;
  }
  void observe(const Observation& obs) override {
    if (obs.opponent_action >= 0) last_ = obs.opponent_action;
  }
  std::string kind() const override { return "secondary_echo"; }

 private:
  SeparationMeta meta_;
  int last_ = 0;
};

class BrokenLearner : public Learner {
 public:
  void init(int n, long, std::uint64_t) override { n_ = n; }
  std::vector<double> act(long) override { return std::vector<double>(n_, 1.0); }
  void observe(const Observation&) override {}
  std::string kind() const override { return "broken"; }

 private:
  int n_ = 0;
};

}  // namespace

TEST_CASE("expected-mode fixed-vs-fixed play is the product distribution") {
  Game g = builtin_game("fig1");
  LearnerConfig fa = LearnerConfig::of("fixed");
  fa.fixed_strategy = {0.5, 0.5};
  LearnerConfig fb = LearnerConfig::of("fixed");
  fb.fixed_strategy = {0.25, 0.25, 0.5};
  auto a = make_learner(fa);
  auto b = make_learner(fb);
  Trajectory traj = simulate(g, *a, *b, 16, PlayMode::expected, 1);
  auto h = sigma_hat(traj);
  CHECK(h[0][0] == 0.125);
  CHECK(h[1][2] == 0.25);
  CHECK(traj.steps.front().rew_a == traj.steps.back().rew_a);
}

TEST_CASE("sampled simulation is seed-deterministic") {
  Game g = builtin_game("g1");
  LearnerConfig cfg = LearnerConfig::of("mwu");
  cfg.reward_bound = 2;
  auto run = [&](std::uint64_t seed) {
    auto a = make_learner(cfg);
    auto b = make_learner(cfg);
    return simulate(g, *a, *b, 400, PlayMode::sampled, seed);
  };
  Trajectory t1 = run(5), t2 = run(5), t3 = run(6);
  bool same = true, diff = false;
  for (long t = 0; t < 400; ++t) {
    same = same && t1.steps[t].i == t2.steps[t].i && t1.steps[t].j == t2.steps[t].j;
    diff = diff || t1.steps[t].i != t3.steps[t].i || t1.steps[t].j != t3.steps[t].j;
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("invalid strategies abort with diagnostics") {
  Game g = builtin_game("fig1");
  BrokenLearner bad;
  LearnerConfig fb = LearnerConfig::of("fixed");
  fb.fixed_strategy = {1.0, 0.0, 0.0};
  auto b = make_learner(fb);
  CHECK_THROWS_WITH_AS(simulate(g, bad, *b, 10, PlayMode::expected, 1),
                       doctest::Contains("invalid distribution"), std::runtime_error);
}

TEST_CASE("targeted endpoint window schedule follows the accumulator law") {
  Game g = builtin_game("fig1");
  JointDistribution psi = optimal_unconstrained_external(g);
  LearnerConfig mwu = LearnerConfig::of("mwu");
  mwu.reward_bound = 3;
  auto [ea, eb] = targeted_pair(g, psi, make_deviation_set(g, Player::A, DeviationKind::none),
                                make_deviation_set(g, Player::B, DeviationKind::external), mwu,
                                mwu, 0);
  Trajectory traj = simulate(g, *ea, *eb, 2000, PlayMode::expected, 3);

  REQUIRE(ea->windows().size() > 2);
  CHECK(ea->windows()[0].length == 6);  // Z_1 = M*N = 6
  CHECK(ea->windows()[0].start_round == 1);
  CHECK(ea->windows()[1].start_round == 7);

  // Replay the accumulator exactly: Z += largest k/2^40 below 1/(2 sqrt(t)).
  mpq_class z(6);
  long round = 0;
  for (size_t w = 0; w + 1 < ea->windows().size(); ++w) {
    mpz_class len = z.get_num() / z.get_den();
    CHECK(ea->windows()[w].length == len.get_si());
    round += len.get_si();
    mpz_class num = (mpz_class(1) << 78) / round;
    mpq_class inc(sqrt(num), mpz_class(1) << 40);
    inc.canonicalize();
    z += inc;
  }

  // Both endpoints agree on the schedule and never defect on each other.
  CHECK(ea->violations() == 0);
  CHECK(eb->violations() == 0);
  CHECK_FALSE(ea->defected());
  CHECK_FALSE(eb->defected());

  // Each complete window reproduces psi within the floor-rounding bound.
  for (const auto& w : ea->windows()) {
    if (w.start_round + w.length - 1 > traj.rounds()) continue;
    CHECK(window_l1(w, psi) <= 6.0 / static_cast<double>(w.length) + 1e-12);
  }
  CHECK(traj.average_reward(Player::A) >= 2.0 - 6.0 / 40.0);
}

TEST_CASE("targeted endpoint defects after the violation budget") {
  Game g = builtin_game("fig1");
  JointDistribution psi = optimal_unconstrained_external(g);
  LearnerConfig mwu = LearnerConfig::of("mwu");
  mwu.reward_bound = 3;
  auto pair = targeted_pair(g, psi, make_deviation_set(g, Player::A, DeviationKind::none),
                            make_deviation_set(g, Player::B, DeviationKind::external), mwu, mwu,
                            10);
  LearnerConfig hostile = LearnerConfig::of("fixed");
  hostile.fixed_strategy = {0.0, 1.0};
  auto adversary = make_learner(hostile);
  simulate(g, *adversary, *pair.second, 600, PlayMode::expected, 4);
  CHECK(pair.second->defected());
  CHECK(pair.second->violations() == 10);
  CHECK(pair.second->defect_round() <= 45);  // ~3 violations per 6-round window
}

TEST_CASE("exploit pair reaches the unconstrained-external value") {
  Game fig1 = builtin_game("fig1");
  auto pair = exploit_noregret(fig1);
  Trajectory traj = simulate(fig1, *pair.first, *pair.second, 4000, PlayMode::expected, 5);
  CHECK(traj.average_reward(Player::A) >= 2.0 - 0.1);

  Game g1 = builtin_game("g1");
  auto pair2 = exploit_noregret(g1);
  Trajectory traj2 = simulate(g1, *pair2.first, *pair2.second, 10000, PlayMode::expected, 5);
  CHECK(traj2.average_reward(Player::A) >= 8.0 / 5.0 - 0.05);
}

TEST_CASE("constructed learner keeps its regret guarantee against a random adversary") {
  Game g = builtin_game("fig1");
  const long rounds = 10000;
  auto pair = exploit_noregret(g);
  LearnerConfig random_mix = LearnerConfig::of("fixed");
  random_mix.fixed_strategy = {0.3, 0.7};
  auto adversary = make_learner(random_mix);
  Trajectory traj = simulate(g, *adversary, *pair.second, rounds, PlayMode::expected, 15);

  auto ext_b = make_deviation_set(g, Player::B, DeviationKind::external);
  double regret = phi_regret(traj, g, Player::B, ext_b).value;
  const double bound = g.utility_bound.to_double();
  const long t_distrust = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(rounds))));
  long max_window = 0;
  for (const auto& w : pair.second->windows()) max_window = std::max(max_window, w.length);
  double envelope = 2.0 * std::sqrt(static_cast<double>(rounds) * std::log(g.n)) * bound;
  CHECK(regret <= envelope + static_cast<double>(t_distrust) * bound +
                      static_cast<double>(max_window));
}

TEST_CASE("self-play of calibrated multiplicative weights stays inside the envelope") {
  Game g1 = builtin_game("g1");
  const long rounds = 10000;
  LearnerConfig mwu = LearnerConfig::of("mwu");
  mwu.reward_bound = 2;
  auto a = make_learner(mwu);
  auto b = make_learner(mwu);
  Trajectory traj = simulate(g1, *a, *b, rounds, PlayMode::expected, 16);
  double env = 2.0 * std::sqrt(static_cast<double>(rounds) * std::log(4.0));
  for (Player p : {Player::A, Player::B}) {
    auto dev = make_deviation_set(g1, p, DeviationKind::external);
    CHECK(phi_regret(traj, g1, p, dev).value / mwu.reward_bound <= env);
  }
}

TEST_CASE("stackelberg commitment against an instant responder") {
  Game g = builtin_game("fig1");
  bool ok = false;
  auto commit = stackelberg_commit(g, Player::A, 0.01, &ok);
  CHECK(ok);
  auto oracle = make_learner(LearnerConfig::of("br_oracle"));
  Trajectory traj = simulate(g, *commit, *oracle, 500, PlayMode::expected, 6);
  CHECK(traj.average_reward(Player::A) >= 1.0 - 0.02);
}

TEST_CASE("probe-and-commit against an instant responder") {
  Game g = separation_family(4, {2, 4});
  const long t_star = 50;
  auto exploiter = noswap_exploiter(g, 10.0, t_star);
  auto oracle = make_learner(LearnerConfig::of("br_oracle"));
  Trajectory traj = simulate(g, *exploiter, *oracle, 2000, PlayMode::sampled, 7);
  CHECK(exploiter->committed());
  CHECK(exploiter->commit_action() == 3);  // largest undominated primary
  CHECK_FALSE(exploiter->fallback_commit());
  CHECK(exploiter->identified() == std::vector<bool>{false, true, false, true});
  CHECK(exploiter->probe_rounds() <= 4 * (t_star + 2));
  CHECK(traj.average_reward(Player::A) > 0.9 * (2000.0 - exploiter->probe_rounds()) / 2000.0);
}

TEST_CASE("probe fallback flags when no primary is confirmed") {
  Game g = separation_family(3, {3});
  SecondaryEcho echo(*g.separation);
  auto exploiter = noswap_exploiter(g, 5.0, 20);
  simulate(g, *exploiter, echo, 500, PlayMode::sampled, 8);
  CHECK(exploiter->committed());
  CHECK(exploiter->fallback_commit());
  CHECK(exploiter->commit_action() == 2);  // defaults to the last action
}

TEST_CASE("exploiter preconditions") {
  Game g = separation_family(3, {3});
  CHECK_THROWS_AS(noswap_exploiter(g, 50.0, 20), std::invalid_argument);  // t* <= tau
  CHECK_THROWS_AS(noswap_exploiter(builtin_game("g1"), 1.0, 10), std::invalid_argument);
  auto exploiter = noswap_exploiter(g, 5.0, 20);
  auto fixed = LearnerConfig::of("fixed");
  fixed.fixed_strategy = std::vector<double>(g.n, 1.0 / g.n);
  auto b = make_learner(fixed);
  CHECK_THROWS_AS(simulate(g, *exploiter, *b, 10, PlayMode::expected, 1), std::invalid_argument);
}

TEST_CASE("query driver answers a pure query against the oracle in W rounds") {
  Game g = builtin_game("fig1");
  auto oracle = make_learner(LearnerConfig::of("br_oracle"));
  oracle->init(g.n, 1000, 1);
  QueryConfig cfg;
  cfg.window = 50;
  cfg.round_cap = 1000;
  QuerySession session(g, *oracle, cfg, 9);
  auto out = session.query({1.0, 0.0});
  REQUIRE(out.answered);
  CHECK(out.action == 0);
  CHECK(out.rounds == 50);
}

TEST_CASE("history saturation slows later queries") {
  Game g = builtin_game("fig1");
  QueryConfig cfg;
  cfg.window = 100;
  cfg.round_cap = 500000;
  cfg.saturation = 0.5;
  LearnerConfig mwu = LearnerConfig::of("mwu");
  mwu.reward_bound = 3;

  auto fresh = make_learner(mwu);
  fresh->init(g.n, 1L << 16, 2);
  QuerySession s1(g, *fresh, cfg, 10);
  auto direct = s1.query({1.0, 0.0});
  REQUIRE(direct.answered);
  CHECK(direct.action == 0);

  auto warmed = make_learner(mwu);
  warmed->init(g.n, 1L << 16, 2);
  QuerySession s2(g, *warmed, cfg, 10);
  s2.query({0.0, 1.0});  // saturate history toward b2 first
  auto after = s2.query({1.0, 0.0});
  REQUIRE(after.answered);
  CHECK(after.action == 0);  // the stale b2 lock is not accepted as the answer
  CHECK(after.rounds > direct.rounds);
}

TEST_CASE("grid sweep on a single-action leader") {
  RatMat ua = {{Rational(1), Rational(0)}};
  RatMat ub = {{Rational(0), Rational(1)}};
  Game g = make_game(ua, ub);
  auto oracle = make_learner(LearnerConfig::of("br_oracle"));
  oracle->init(g.n, 1000, 3);
  QueryConfig cfg;
  cfg.window = 20;
  cfg.round_cap = 500;
  QuerySession session(g, *oracle, cfg, 11);
  LeaderView view{&g.u_a, g.m, g.n};
  auto res = grid_stackelberg_learner(view, session, 0.5);
  CHECK(res.alpha == std::vector<double>{1.0});
  CHECK(res.log.size() == 1);
  CHECK(res.best_response == 1);
}

TEST_CASE("grid sweep skips timeouts and still finds the commitment") {
  Game g = builtin_game("fig1");
  auto oracle = make_learner(LearnerConfig::of("br_oracle"));
  oracle->init(g.n, 100000, 4);
  QueryConfig cfg;
  cfg.window = 100;
  cfg.round_cap = 2000;
  QuerySession session(g, *oracle, cfg, 12);
  LeaderView view{&g.u_a, g.m, g.n};
  auto res = grid_stackelberg_learner(view, session, 0.1);
  CHECK(res.value >= 0.9);
  CHECK(res.best_response == 0);
  bool some_timeout = false;
  for (const auto& pt : res.log) some_timeout = some_timeout || !pt.outcome.answered;
  CHECK(some_timeout);  // interior points flip the instant responder forever
}
