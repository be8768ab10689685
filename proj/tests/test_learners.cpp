#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gamelab/learners.hpp"
#include "gamelab/protocols.hpp"

using namespace gamelab;

namespace {

Observation obs_of(std::vector<double> rewards) {
  Observation o;
  o.rewards = std::move(rewards);
  return o;
}

void check_distribution(const std::vector<double>& p) {
  double sum = 0;
  for (double v : p) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

}  // namespace

TEST_CASE("mwu basics") {
  LearnerConfig cfg = LearnerConfig::of("mwu");
  cfg.reward_bound = 1;
  auto l = make_learner(cfg);
  l->init(2, 10000, 1);

  SUBCASE("identical rewards keep the distribution uniform") {
    for (long t = 1; t <= 50; ++t) {
      auto p = l->act(t);
      CHECK(p[0] == doctest::Approx(0.5));
      l->observe(obs_of({0.7, 0.7}));
    }
  }
  SUBCASE("a constant gap concentrates the weights") {
    for (long t = 1; t <= 10000; ++t) {
      l->observe(obs_of({0.0, 1.0}));
    }
    CHECK(l->act(10001)[1] >= 0.99);
  }
  SUBCASE("missing horizon is an error when eta is not given") {
    auto fresh = make_learner(cfg);
    CHECK_THROWS_AS(fresh->init(2, 0, 1), std::invalid_argument);
  }
}

TEST_CASE("learners emit valid distributions and are seed-deterministic") {
  for (const char* kind : {"mwu", "rmbd", "ftl", "br_oracle", "interval_restart_mwu"}) {
    LearnerConfig cfg = LearnerConfig::of(kind);
    cfg.reward_bound = 1;
    if (cfg.kind == "interval_restart_mwu") cfg.restart_window = 16;
    auto l1 = make_learner(cfg);
    auto l2 = make_learner(cfg);
    l1->init(3, 256, 9);
    l2->init(3, 256, 9);
    std::uint64_t state = 1234;
    for (long t = 1; t <= 256; ++t) {
      auto p1 = l1->act(t);
      auto p2 = l2->act(t);
      check_distribution(p1);
      CHECK(p1 == p2);  // same seed + same history = same play, bit for bit
      std::vector<double> r(3);
      for (auto& v : r) {
        state = splitmix64(state);
        v = static_cast<double>(state >> 11) * 0x1.0p-53;
      }
      l1->observe(obs_of(r));
      l2->observe(obs_of(r));
    }
  }
}

TEST_CASE("ftl plays the cumulative argmax with lexicographic ties") {
  auto l = make_learner(LearnerConfig::of("ftl"));
  l->init(3, 100, 1);
  CHECK(l->act(1)[0] == 1.0);  // all-zero history: lowest index
  l->observe(obs_of({0, 0, 1}));
  CHECK(l->act(2)[2] == 1.0);
  l->observe(obs_of({2, 0, 0}));
  CHECK(l->act(3)[0] == 1.0);
}

TEST_CASE("br_oracle responds to the last reward vector only") {
  auto l = make_learner(LearnerConfig::of("br_oracle"));
  l->init(3, 100, 1);
  CHECK(l->act(1)[0] == 1.0);
  l->observe(obs_of({0, 5, 0}));
  CHECK(l->act(2)[1] == 1.0);
  l->observe(obs_of({0, 0, 1}));
  CHECK(l->act(3)[2] == 1.0);
}

TEST_CASE("composite switches exactly after the burn-in") {
  LearnerConfig cfg = LearnerConfig::of("composite");
  cfg.t_burn = 5;
  cfg.inner = std::make_shared<LearnerConfig>(LearnerConfig::of("fixed"));
  cfg.inner->fixed_strategy = {1.0, 0.0};
  cfg.second = std::make_shared<LearnerConfig>(LearnerConfig::of("fixed"));
  cfg.second->fixed_strategy = {0.0, 1.0};
  auto l = make_learner(cfg);
  l->init(2, 100, 1);
  for (long t = 1; t <= 10; ++t) {
    auto p = l->act(t);
    CHECK(p[t <= 5 ? 0 : 1] == 1.0);
    l->observe(obs_of({0, 0}));
  }
  CHECK_THROWS_AS(make_learner(LearnerConfig::of("composite")), std::invalid_argument);
}

TEST_CASE("fixed learner validates its strategy length") {
  LearnerConfig cfg = LearnerConfig::of("fixed");
  cfg.fixed_strategy = {0.5, 0.5};
  auto l = make_learner(cfg);
  CHECK_THROWS_AS(l->init(3, 10, 1), std::invalid_argument);
}

TEST_CASE("interval restart forgets between windows") {
  LearnerConfig cfg = LearnerConfig::of("interval_restart_mwu");
  cfg.restart_window = 8;
  cfg.reward_bound = 1;
  cfg.eta = 2.0;
  auto l = make_learner(cfg);
  l->init(2, 64, 1);
  for (long t = 1; t <= 8; ++t) l->observe(obs_of({1.0, 0.0}));
  // The reset fires after the 8th observation, so play is uniform again.
  auto p = l->act(9);
  CHECK(p[0] == doctest::Approx(0.5));
}

TEST_CASE("rmbd rounds probabilities onto the epoch grid") {
  LearnerConfig cfg = LearnerConfig::of("rmbd");
  cfg.reward_bound = 1;
  auto l = make_learner(cfg);
  const int n = 3;
  l->init(n, 1 << 12, 1);
  std::uint64_t state = 77;
  for (long t = 1; t <= (1 << 12); ++t) {
    auto p = l->act(t);
    check_distribution(p);
    if (t > 2) {
      double scale = 2;
      while (scale < static_cast<double>(t)) scale *= 2;
      double gamma = rmbd_lemma_gamma(scale, n);
      if (gamma > 0) {
        // Every action except the mass-absorbing argmax sits on the grid.
        int anchor = 0;
        for (int k = 1; k < n; ++k)
          if (p[k] > p[anchor]) anchor = k;
        for (int k = 0; k < n; ++k) {
          if (k == anchor) continue;
          double q = p[k] / (4 * gamma);
          CHECK(std::abs(q - std::round(q)) < 1e-9);
        }
      }
    }
    std::vector<double> r(n);
    for (auto& v : r) {
      state = splitmix64(state);
      v = static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    l->observe(obs_of(r));
  }
}

TEST_CASE("rmbd zeroes far-trailing actions and shuns dominated play") {
  Game g = builtin_game("fig1");
  LearnerConfig fixed = LearnerConfig::of("fixed");
  fixed.fixed_strategy = {1.0, 0.0};
  LearnerConfig rmbd = LearnerConfig::of("rmbd");
  rmbd.reward_bound = g.utility_bound.to_double();
  auto a = make_learner(fixed);
  auto b = make_learner(rmbd);
  const long rounds = 1L << 16;
  Trajectory traj = simulate(g, *a, *b, rounds, PlayMode::expected, 5);

  // Against the constant a1, actions b2 and b3 trail linearly; from some
  // round on their probabilities must be exactly zero every round.
  long first_zero = -1;
  for (long t = 0; t < rounds; ++t) {
    if (traj.steps[t].q[1] == 0.0 && traj.steps[t].q[2] == 0.0) {
      first_zero = t + 1;
      break;
    }
  }
  REQUIRE(first_zero > 0);
  CHECK(first_zero <= (1L << 13));
  for (long t = (1L << 13); t < rounds; ++t) {
    CHECK(traj.steps[t].q[1] == 0.0);
    CHECK(traj.steps[t].q[2] == 0.0);
  }
}

TEST_CASE("rmbd plays dominated actions a vanishing fraction of rounds") {
  Game g = builtin_game("fig1");
  const long rounds = 1L << 16;
  LearnerConfig rmbd = LearnerConfig::of("rmbd");
  rmbd.reward_bound = g.utility_bound.to_double();
  for (const char* opponent : {"mwu", "fixed"}) {
    LearnerConfig oc = LearnerConfig::of(opponent);
    oc.reward_bound = g.utility_bound.to_double();
    if (oc.kind == "fixed") oc.fixed_strategy = {0.5, 0.5};
    auto a = make_learner(oc);
    auto b = make_learner(rmbd);
    Trajectory traj = simulate(g, *a, *b, rounds, PlayMode::expected, 6);
    double b3_mass = traj.play_counts_b[2] / static_cast<double>(rounds);
    CHECK(b3_mass <= 0.02);
  }
}

TEST_CASE("swap wrapper: unanimous recommendation is an absorbing state") {
  LearnerConfig inner = LearnerConfig::of("fixed");
  inner.fixed_strategy = {0.0, 1.0, 0.0};
  LearnerConfig cfg = LearnerConfig::of("swap_wrapper");
  cfg.inner = std::make_shared<LearnerConfig>(inner);
  auto l = make_learner(cfg);
  l->init(3, 100, 1);
  auto p = l->act(1);
  CHECK(p[1] == doctest::Approx(1.0));
}

TEST_CASE("swap wrapper internal regret against a fixed opponent") {
  Game g1 = builtin_game("g1");
  const long rounds = 10000;
  LearnerConfig wrapper = LearnerConfig::of("swap_wrapper");
  wrapper.reward_bound = 2;
  LearnerConfig fixed = LearnerConfig::of("fixed");
  fixed.fixed_strategy = {0.4, 0.3, 0.2, 0.1};
  auto a = make_learner(fixed);
  auto b = make_learner(wrapper);
  Trajectory traj = simulate(g1, *a, *b, rounds, PlayMode::expected, 7);
  auto ib = make_deviation_set(g1, Player::B, DeviationKind::internal);
  double raw = phi_regret(traj, g1, Player::B, ib).value;
  double rescaled = raw / wrapper.reward_bound;
  CHECK(rescaled <= 10.0 * std::sqrt(rounds * std::log(4.0)));
}

TEST_CASE("swap wrapper self-play approaches correlated equilibrium") {
  Game g = builtin_game("fig1");
  const long rounds = 10000;
  LearnerConfig wrapper = LearnerConfig::of("swap_wrapper");
  wrapper.reward_bound = g.utility_bound.to_double();
  auto a = make_learner(wrapper);
  auto b = make_learner(wrapper);
  Trajectory traj = simulate(g, *a, *b, rounds, PlayMode::expected, 8);
  auto sigma = JointDistribution::from_float(sigma_hat(traj));
  auto ia = make_deviation_set(g, Player::A, DeviationKind::internal);
  auto ib = make_deviation_set(g, Player::B, DeviationKind::internal);
  auto check = verify_approx_equilibrium(g, sigma, ia, ib, 0.05);
  CHECK(check.pass);
}

TEST_CASE("mean-based audit flags and clears the right traces") {
  Game g = builtin_game("fig1");
  const long rounds = 4096;

  LearnerConfig fixed_a = LearnerConfig::of("fixed");
  fixed_a.fixed_strategy = {1.0, 0.0};

  SUBCASE("follow-the-leader never plays trailing actions") {
    LearnerConfig ftl = LearnerConfig::of("ftl");
    ftl.reward_bound = 3;
    auto a = make_learner(fixed_a);
    auto b = make_learner(ftl);
    Trajectory traj = simulate(g, *a, *b, rounds, PlayMode::expected, 9);
    CHECK(mean_based_audit(traj, g, Player::B, 0.01).empty());
  }
  SUBCASE("a uniform learner violates the property") {
    LearnerConfig uni = LearnerConfig::of("fixed");
    uni.fixed_strategy = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    auto a = make_learner(fixed_a);
    auto b = make_learner(uni);
    Trajectory traj = simulate(g, *a, *b, rounds, PlayMode::expected, 10);
    auto violations = mean_based_audit(traj, g, Player::B, 0.05);
    CHECK_FALSE(violations.empty());
    CHECK(violations.front().prob == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("lemma gamma schedule") {
  CHECK(rmbd_lemma_gamma(0, 4) == 0.0);
  CHECK(rmbd_lemma_gamma(1024, 1) == 0.0);
  double x = std::sqrt(65536.0 * std::log(4.0));
  CHECK(rmbd_lemma_gamma(65536, 4) == doctest::Approx(2.0 * std::log(x) / x));
  CHECK(rmbd_lemma_gamma(65536, 4) < rmbd_lemma_gamma(4096, 4));
}
