#include "gamelab/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gamelab {

namespace {

std::vector<double> pure_strategy(int n, int k) {
  std::vector<double> p(n, 0.0);
  p[k] = 1.0;
  return p;
}

double uniform_unit(std::uint64_t& state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

int sample_index(std::uint64_t& state, const std::vector<double>& p) {
  double u = uniform_unit(state);
  double acc = 0;
  for (size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(p.size()) - 1;
}

void check_distribution(const std::vector<double>& p, int expect, Player who, long round) {
  double sum = 0;
  bool bad = static_cast<int>(p.size()) != expect;
  for (double v : p) {
    if (v < -1e-12) bad = true;
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) bad = true;
  if (bad) {
    std::ostringstream os;
    os << "simulate: player " << to_string(who) << " emitted an invalid distribution at round "
       << round << " (size " << p.size() << ", sum " << sum << ")";
    throw std::runtime_error(os.str());
  }
}

}  // namespace

Trajectory simulate(const Game& g, Learner& learner_a, Learner& learner_b, long rounds,
                    PlayMode mode, std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("simulate: need at least one round");
  g.validate();
  Trajectory traj;
  traj.mode = mode;
  traj.seed = seed;
  learner_a.init(g.m, rounds, splitmix64(seed ^ 0xA11CEULL));
  learner_b.init(g.n, rounds, splitmix64(seed ^ 0xB0B00ULL));
  std::uint64_t rng = splitmix64(seed ^ 0x5A5A5AULL);

  for (long t = 1; t <= rounds; ++t) {
    TrajectoryStep step;
    step.p = learner_a.act(t);
    check_distribution(step.p, g.m, Player::A, t);
    step.q = learner_b.act(t);
    check_distribution(step.q, g.n, Player::B, t);

    Observation for_a, for_b;
    if (mode == PlayMode::sampled) {
      step.i = sample_index(rng, step.p);
      step.j = sample_index(rng, step.q);
      step.rew_a = g.ua(step.i, step.j).to_double();
      step.rew_b = g.ub(step.i, step.j).to_double();
      for_a.opponent_action = step.j;
      for_b.opponent_action = step.i;
      for_a.opponent_mixed = pure_strategy(g.n, step.j);
      for_b.opponent_mixed = pure_strategy(g.m, step.i);
    } else {
      for (int i = 0; i < g.m; ++i)
        for (int j = 0; j < g.n; ++j) {
          double w = step.p[i] * step.q[j];
          if (w == 0.0) continue;
          step.rew_a += w * g.ua(i, j).to_double();
          step.rew_b += w * g.ub(i, j).to_double();
        }
      for_a.opponent_mixed = step.q;
      for_b.opponent_mixed = step.p;
    }
    for_a.rewards = observed_rewards(g, Player::A, step);
    for_b.rewards = observed_rewards(g, Player::B, step);
    learner_a.observe(for_a);
    learner_b.observe(for_b);
    traj.append(g, std::move(step));
  }
  return traj;
}

// --- Targeted pair ----------------------------------------------------------

namespace {

// Largest k with (k / 2^40) <= 1 / (2 sqrt(t)): k = floor(sqrt(2^78 / t)).
Rational dyadic_half_inv_sqrt(long t) {
  mpz_class num = mpz_class(1) << 78;
  num /= t;
  mpz_class k = sqrt(num);
  mpq_class q(k, mpz_class(1) << 40);
  q.canonicalize();
  return Rational(q);
}

RatMat exact_distribution(const JointDistribution& psi) {
  if (psi.exact) return psi.p;
  RatMat out(psi.m, RatVec(psi.n));
  for (int i = 0; i < psi.m; ++i)
    for (int j = 0; j < psi.n; ++j) out[i][j] = Rational(mpq_class(psi.pf[i][j]));
  return out;
}

}  // namespace

double window_l1(const WindowRecord& w, const JointDistribution& psi) {
  double acc = 0;
  for (int i = 0; i < psi.m; ++i)
    for (int j = 0; j < psi.n; ++j) {
      double emp = static_cast<double>(w.counts[i * psi.n + j]) / static_cast<double>(w.length);
      acc += std::abs(emp - psi.at_f(i, j));
    }
  return acc;
}

TargetedEndpoint::TargetedEndpoint(const Game& g, Player side, const JointDistribution& psi,
                                   LearnerConfig fallback, long t_distrust)
    : game_(g), side_(side), psi_(psi), fallback_cfg_(std::move(fallback)),
      t_distrust_cfg_(t_distrust) {
  if (psi.m != g.m || psi.n != g.n)
    throw std::invalid_argument("TargetedEndpoint: psi shape does not match the game");
  psi_.validate();
  psi_exact_ = exact_distribution(psi_);
}

void TargetedEndpoint::init(int action_count, long horizon_hint, std::uint64_t seed) {
  if (action_count != game_.actions(side_))
    throw std::invalid_argument("TargetedEndpoint: action count mismatch");
  if (horizon_hint < 1) throw std::invalid_argument("TargetedEndpoint: horizon required");
  t_distrust_ = t_distrust_cfg_ > 0
                    ? t_distrust_cfg_
                    : static_cast<long>(std::ceil(std::sqrt(static_cast<double>(horizon_hint))));
  fallback_ = make_learner(fallback_cfg_);
  fallback_->init(action_count, horizon_hint, splitmix64(seed ^ 0xFA11ULL));
  z_ = Rational(static_cast<long>(game_.m) * game_.n);
  round_ = 0;
  violations_ = 0;
  defected_ = false;
  defect_round_ = 0;
  windows_.clear();
  schedule_.clear();
  pos_ = 0;
  build_window();
}

void TargetedEndpoint::build_window() {
  // Length(t) = floor(Z); c_i = floor(Length * psi_i) per pure pair in
  // lexicographic order, leftover rounds on the largest-mass pair.
  mpz_class len_z = z_.raw().get_num() / z_.raw().get_den();
  long length = len_z.get_si();
  if (length < 1) length = 1;
  const int cells = game_.m * game_.n;
  std::vector<long> counts(cells, 0);
  long assigned = 0;
  int fill = 0;
  for (int idx = 0; idx < cells; ++idx) {
    const Rational& mass = psi_exact_[idx / game_.n][idx % game_.n];
    mpq_class scaled = mass.raw() * length;
    mpz_class c = scaled.get_num() / scaled.get_den();
    counts[idx] = c.get_si();
    assigned += counts[idx];
    if (psi_exact_[idx / game_.n][idx % game_.n] >
        psi_exact_[fill / game_.n][fill % game_.n])
      fill = idx;
  }
  counts[fill] += length - assigned;

  WindowRecord rec;
  rec.start_round = round_ + 1;
  rec.length = length;
  rec.counts = counts;
  windows_.push_back(std::move(rec));

  schedule_.clear();
  schedule_.reserve(length);
  for (int idx = 0; idx < cells; ++idx)
    for (long c = 0; c < counts[idx]; ++c)
      schedule_.emplace_back(idx / game_.n, idx % game_.n);
  pos_ = 0;
}

std::vector<double> TargetedEndpoint::act(long t) {
  if (defected_) return fallback_->act(t);
  const auto& pair = schedule_[pos_];
  const int own = side_ == Player::A ? pair.first : pair.second;
  return pure_strategy(game_.actions(side_), own);
}

void TargetedEndpoint::observe(const Observation& obs) {
  fallback_->observe(obs);
  if (defected_) return;

  const auto& pair = schedule_[pos_];
  TrajectoryStep probe;
  if (side_ == Player::A) {
    probe.j = pair.second;
  } else {
    probe.i = pair.first;
  }
  // Departures from the schedule are detected through the reward vector the
  // scheduled opponent action would have produced.
  if (observed_rewards(game_, side_, probe) != obs.rewards) ++violations_;

  ++round_;
  ++pos_;
  if (pos_ >= schedule_.size()) {
    z_ += dyadic_half_inv_sqrt(round_);
    build_window();
  }
  if (violations_ >= t_distrust_) {
    defected_ = true;
    defect_round_ = round_;
  }
}

std::pair<std::unique_ptr<TargetedEndpoint>, std::unique_ptr<TargetedEndpoint>> targeted_pair(
    const Game& g, const JointDistribution& psi, const DeviationSet& dev_a,
    const DeviationSet& dev_b, LearnerConfig fallback_a, LearnerConfig fallback_b,
    long t_distrust) {
  if (dev_a.player != Player::A || dev_a.dim != g.m || dev_b.player != Player::B ||
      dev_b.dim != g.n)
    throw std::invalid_argument("targeted_pair: deviation sets do not match the game");
  auto a = std::make_unique<TargetedEndpoint>(g, Player::A, psi, std::move(fallback_a), t_distrust);
  auto b = std::make_unique<TargetedEndpoint>(g, Player::B, psi, std::move(fallback_b), t_distrust);
  return {std::move(a), std::move(b)};
}

std::pair<std::unique_ptr<TargetedEndpoint>, std::unique_ptr<TargetedEndpoint>> exploit_noregret(
    const Game& g) {
  EquilibriumQuery q;
  q.game = g;
  q.dev_a = make_deviation_set(g, Player::A, DeviationKind::none);
  q.dev_b = make_deviation_set(g, Player::B, DeviationKind::external);
  q.target = Player::A;
  q.sense = LpSense::maximize;
  ValueResult best = equilibrium_value(q);
  LearnerConfig mwu = LearnerConfig::of("mwu");
  mwu.reward_bound = g.utility_bound.to_double();
  return targeted_pair(g, best.witness, q.dev_a, q.dev_b, mwu, mwu, 0);
}

std::unique_ptr<Learner> stackelberg_commit(const Game& g, Player leader, double eps,
                                            bool* assumption_ok) {
  RatVec alpha = strict_stackelberg_strategy(g, leader, Rational(mpq_class(eps)), assumption_ok);
  LearnerConfig cfg = LearnerConfig::of("fixed");
  cfg.fixed_strategy = to_doubles(alpha);
  return make_learner(cfg);
}

// --- Separation-family exploiter -------------------------------------------

NoswapExploiter::NoswapExploiter(const Game& g, double tau, long t_star)
    : tau_(tau), t_star_(t_star) {
  if (!g.separation)
    throw std::invalid_argument("noswap_exploiter: game lacks separation-family metadata");
  if (static_cast<double>(t_star) <= tau)
    throw std::invalid_argument("noswap_exploiter: need t_star > tau");
  meta_ = *g.separation;
}

void NoswapExploiter::init(int action_count, long, std::uint64_t) {
  if (action_count != meta_.m)
    throw std::invalid_argument("noswap_exploiter: action count mismatch");
  probe_ = 0;
  count_primary_ = count_secondary_ = 0;
  current_window_ = 0;
  probe_rounds_ = 0;
  committed_ = false;
  fallback_commit_ = false;
  commit_action_ = -1;
  identified_.assign(meta_.m, false);
  window_rounds_.clear();
}

std::vector<double> NoswapExploiter::act(long) {
  return pure_strategy(meta_.m, committed_ ? commit_action_ : probe_);
}

void NoswapExploiter::observe(const Observation& obs) {
  if (committed_) return;
  if (obs.opponent_action < 0)
    throw std::invalid_argument("noswap_exploiter: needs sampled opponent observations");
  ++probe_rounds_;
  ++current_window_;
  if (obs.opponent_action == meta_.primary_col(probe_)) ++count_primary_;
  if (obs.opponent_action == meta_.secondary_col(probe_)) ++count_secondary_;
  if (count_primary_ >= t_star_) {
    identified_[probe_] = true;
    advance_window();
  } else if (count_secondary_ >= t_star_) {
    advance_window();
  }
}

void NoswapExploiter::advance_window() {
  window_rounds_.push_back(current_window_);
  current_window_ = 0;
  count_primary_ = count_secondary_ = 0;
  ++probe_;
  if (probe_ < meta_.m) return;
  committed_ = true;
  commit_action_ = meta_.m - 1;
  fallback_commit_ = true;
  for (int i = meta_.m - 1; i >= 0; --i) {
    if (identified_[i]) {
      commit_action_ = i;
      fallback_commit_ = false;
      break;
    }
  }
}

std::unique_ptr<NoswapExploiter> noswap_exploiter(const Game& g, double tau, long t_star) {
  return std::make_unique<NoswapExploiter>(g, tau, t_star);
}

// --- Query simulation -------------------------------------------------------

QuerySession::QuerySession(const Game& g, Learner& learner, QueryConfig cfg, std::uint64_t seed)
    : game_(g), learner_(learner), cfg_(cfg), rng_(splitmix64(seed ^ 0x9E3DULL)) {
  if (cfg_.delta <= 0 || cfg_.delta >= 0.5)
    throw std::invalid_argument("QuerySession: delta must lie in (0, 1/2)");
  if (cfg_.window < 1) throw std::invalid_argument("QuerySession: window must be >= 1");
  base_counts_.assign(g.m, 0.0);
}

QueryOutcome QuerySession::query(const std::vector<double>& q) {
  if (static_cast<int>(q.size()) != game_.m)
    throw std::invalid_argument("QuerySession::query: target has wrong length");
  if (cfg_.mode == QueryConfig::Mode::adaptive) base_counts_.assign(game_.m, 0.0);
  recent_.clear();

  QueryOutcome out;
  double base_total = 0;
  for (double c : base_counts_) base_total += c;
  const long need = static_cast<long>(std::ceil((1.0 - cfg_.delta) * cfg_.window));
  std::vector<long> window_count(game_.n, 0);
  long last_unsaturated = 0;

  for (long r = 1; r <= cfg_.round_cap; ++r) {
    // Greedy frequency matching: play the action furthest below its target.
    int a = 0;
    double best_deficit = -1e300;
    for (int k = 0; k < game_.m; ++k) {
      double freq = base_total > 0 ? base_counts_[k] / base_total : 0.0;
      double deficit = q[k] - freq;
      if (deficit > best_deficit + 1e-15) {
        best_deficit = deficit;
        a = k;
      }
    }
    ++total_rounds_;
    std::vector<double> mix = learner_.act(total_rounds_);
    check_distribution(mix, game_.n, Player::B, total_rounds_);
    int j = sample_index(rng_, mix);

    Observation fb;
    fb.rewards.resize(game_.n);
    for (int k = 0; k < game_.n; ++k) fb.rewards[k] = game_.ub(a, k).to_double();
    fb.opponent_action = a;
    fb.opponent_mixed = pure_strategy(game_.m, a);
    learner_.observe(fb);

    base_counts_[a] += 1.0;
    base_total += 1.0;
    recent_.push_back(j);
    ++window_count[j];
    if (static_cast<long>(recent_.size()) > cfg_.window) {
      --window_count[recent_.front()];
      recent_.pop_front();
    }
    if (cfg_.saturation > 0) {
      double dist = 0;
      for (int k = 0; k < game_.m; ++k) dist += std::abs(q[k] - base_counts_[k] / base_total);
      if (dist > cfg_.saturation) last_unsaturated = r;
    }
    if (r >= cfg_.window && r - last_unsaturated >= cfg_.window) {
      for (int k = 0; k < game_.n; ++k) {
        if (window_count[k] >= need) {
          out.answered = true;
          out.action = k;
          out.rounds = r;
          break;
        }
      }
      if (out.answered) break;
    }
  }
  if (!out.answered) out.rounds = cfg_.round_cap;
  out.window_freq.assign(game_.n, 0.0);
  if (!recent_.empty())
    for (int k = 0; k < game_.n; ++k)
      out.window_freq[k] = static_cast<double>(window_count[k]) / static_cast<double>(recent_.size());
  log_.push_back(out);
  return out;
}

namespace {

void enumerate_grid(int dims, int total, std::vector<int>& counts,
                    std::vector<std::vector<int>>& out) {
  if (dims == 1) {
    counts.push_back(total);
    out.push_back(counts);
    counts.pop_back();
    return;
  }
  for (int k = total; k >= 0; --k) {
    counts.push_back(k);
    enumerate_grid(dims - 1, total - k, counts, out);
    counts.pop_back();
  }
}

}  // namespace

GridSearchResult grid_stackelberg_learner(const LeaderView& view, QuerySession& session,
                                          double grid_spacing) {
  if (view.u_a == nullptr || view.m < 1) throw std::invalid_argument("grid sweep: empty view");
  if (grid_spacing <= 0 || grid_spacing > 1)
    throw std::invalid_argument("grid sweep: spacing must lie in (0, 1]");
  const int cells = std::max(1, static_cast<int>(std::llround(1.0 / grid_spacing)));
  std::vector<std::vector<int>> grid;
  std::vector<int> scratch;
  enumerate_grid(view.m, cells, scratch, grid);

  GridSearchResult res;
  bool found = false;
  for (const auto& counts : grid) {
    GridPoint pt;
    pt.alpha.resize(view.m);
    for (int k = 0; k < view.m; ++k)
      pt.alpha[k] = static_cast<double>(counts[k]) / static_cast<double>(cells);
    pt.outcome = session.query(pt.alpha);
    if (pt.outcome.answered) {
      double v = 0;
      for (int k = 0; k < view.m; ++k)
        v += pt.alpha[k] * (*view.u_a)[k][pt.outcome.action].to_double();
      pt.value = v;
      if (!found || v > res.value) {
        found = true;
        res.value = v;
        res.alpha = pt.alpha;
        res.best_response = pt.outcome.action;
      }
    }
    res.log.push_back(std::move(pt));
  }
  res.total_rounds = session.total_rounds();
  if (!found) throw std::runtime_error("grid sweep: every query timed out");
  return res;
}

}  // namespace gamelab
