#include "gamelab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gamelab {

LearnerConfig LearnerConfig::of(std::string kind) {
  LearnerConfig cfg;
  cfg.kind = std::move(kind);
  return cfg;
}

double rmbd_lemma_gamma(double t, int n) {
  if (n < 2 || t <= 0) return 0;
  double x = std::sqrt(t * std::log(static_cast<double>(n)));
  if (x <= 1.0) return 0;
  return 2.0 * std::log(x) / x;
}

namespace {

int argmax_index(const std::vector<double>& v) {
  int best = 0;
  for (size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = static_cast<int>(k);
  return best;
}

std::vector<double> softmax(const std::vector<double>& cum, double eta) {
  double hi = *std::max_element(cum.begin(), cum.end());
  std::vector<double> p(cum.size());
  double total = 0;
  for (size_t k = 0; k < cum.size(); ++k) {
    p[k] = std::exp(eta * (cum[k] - hi));
    total += p[k];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::vector<double> pure(int n, int k) {
  std::vector<double> p(n, 0.0);
  p[k] = 1.0;
  return p;
}

class MwuLearner : public Learner {
 public:
  explicit MwuLearner(const LearnerConfig& cfg) : cfg_(cfg) {}

  void init(int action_count, long horizon_hint, std::uint64_t) override {
    n_ = action_count;
    if (cfg_.eta > 0) {
      eta_ = cfg_.eta;
    } else {
      if (horizon_hint < 1)
        throw std::invalid_argument("mwu: horizon hint required to calibrate eta");
      eta_ = std::sqrt(std::log(std::max(n_, 2)) / static_cast<double>(horizon_hint));
    }
    cum_.assign(n_, 0.0);
  }

  std::vector<double> act(long) override { return softmax(cum_, eta_); }

  void observe(const Observation& obs) override {
    for (int k = 0; k < n_; ++k) cum_[k] += rescale_reward(obs.rewards[k], cfg_.reward_bound);
  }

  std::string kind() const override { return "mwu"; }

 private:
  LearnerConfig cfg_;
  int n_ = 0;
  double eta_ = 0;
  std::vector<double> cum_;
};

// Doubling-epoch MWU with probability rounding. Epoch e covers played rounds
// (2^(e-1), 2^e]; its weights are those of a fresh MWU calibrated for 2^e
// rounds and warm-started by replaying the historical average reward, which
// leaves the instance's cumulative rewards equal to the global ones. Live
// probabilities are rounded down to multiples of 4*gamma, with the removed
// mass put on the current argmax.
class RmbdLearner : public Learner {
 public:
  explicit RmbdLearner(const LearnerConfig& cfg) : cfg_(cfg) {}

  void init(int action_count, long, std::uint64_t) override {
    n_ = action_count;
    cum_.assign(n_, 0.0);
    seen_ = 0;
  }

  std::vector<double> act(long) override {
    const long t = seen_ + 1;  // round being played
    double epoch_scale = 2;
    while (epoch_scale < t) epoch_scale *= 2;
    const double eta = std::sqrt(std::log(std::max(n_, 2)) / epoch_scale);
    std::vector<double> p = softmax(cum_, eta);
    if (t <= 2) return p;  // initial plain-MWU run
    const double gamma = cfg_.gamma > 0 ? cfg_.gamma : rmbd_lemma_gamma(epoch_scale, n_);
    if (gamma <= 0) return p;
    const double step = 4 * gamma;
    const int anchor = argmax_index(p);
    double removed = 0;
    for (int k = 0; k < n_; ++k) {
      double r = step * std::floor(p[k] / step);
      removed += p[k] - r;
      p[k] = r;
    }
    p[anchor] += removed;
    return p;
  }

  void observe(const Observation& obs) override {
    for (int k = 0; k < n_; ++k) cum_[k] += rescale_reward(obs.rewards[k], cfg_.reward_bound);
    ++seen_;
  }

  std::string kind() const override { return "rmbd"; }

 private:
  LearnerConfig cfg_;
  int n_ = 0;
  long seen_ = 0;
  std::vector<double> cum_;
};

class FtlLearner : public Learner {
 public:
  explicit FtlLearner(const LearnerConfig& cfg) : cfg_(cfg) {}

  void init(int action_count, long, std::uint64_t) override {
    n_ = action_count;
    cum_.assign(n_, 0.0);
  }

  std::vector<double> act(long) override { return pure(n_, argmax_index(cum_)); }

  void observe(const Observation& obs) override {
    for (int k = 0; k < n_; ++k) cum_[k] += rescale_reward(obs.rewards[k], cfg_.reward_bound);
  }

  std::string kind() const override { return "ftl"; }

 private:
  LearnerConfig cfg_;
  int n_ = 0;
  std::vector<double> cum_;
};

// Instant responder: best-responds to the opponent's most recent play.
class BrOracleLearner : public Learner {
 public:
  void init(int action_count, long, std::uint64_t) override {
    n_ = action_count;
    last_.assign(n_, 0.0);
  }

  std::vector<double> act(long) override { return pure(n_, argmax_index(last_)); }

  void observe(const Observation& obs) override { last_ = obs.rewards; }

  std::string kind() const override { return "br_oracle"; }

 private:
  int n_ = 0;
  std::vector<double> last_;
};

class FixedLearner : public Learner {
 public:
  explicit FixedLearner(const LearnerConfig& cfg) : strategy_(cfg.fixed_strategy) {}

  void init(int action_count, long, std::uint64_t) override {
    if (static_cast<int>(strategy_.size()) != action_count)
      throw std::invalid_argument("fixed learner: strategy length != action count");
  }

  std::vector<double> act(long) override { return strategy_; }
  void observe(const Observation&) override {}
  std::string kind() const override { return "fixed"; }

 private:
  std::vector<double> strategy_;
};

class IntervalRestartMwu : public Learner {
 public:
  explicit IntervalRestartMwu(const LearnerConfig& cfg) : cfg_(cfg) {
    if (cfg_.restart_window < 1)
      throw std::invalid_argument("interval_restart_mwu: restart_window must be >= 1");
  }

  void init(int action_count, long, std::uint64_t) override {
    n_ = action_count;
    eta_ = cfg_.eta > 0
               ? cfg_.eta
               : std::sqrt(std::log(std::max(n_, 2)) / static_cast<double>(cfg_.restart_window));
    cum_.assign(n_, 0.0);
    in_window_ = 0;
  }

  std::vector<double> act(long) override { return softmax(cum_, eta_); }

  void observe(const Observation& obs) override {
    for (int k = 0; k < n_; ++k) cum_[k] += rescale_reward(obs.rewards[k], cfg_.reward_bound);
    if (++in_window_ >= cfg_.restart_window) {
      cum_.assign(n_, 0.0);
      in_window_ = 0;
    }
  }

  std::string kind() const override { return "interval_restart_mwu"; }

 private:
  LearnerConfig cfg_;
  int n_ = 0;
  double eta_ = 0;
  long in_window_ = 0;
  std::vector<double> cum_;
};

// Plays the first learner through round t_burn and the second thereafter.
// Both observe every round, so the second's cumulative accounting spans the
// whole history.
class CompositeLearner : public Learner {
 public:
  explicit CompositeLearner(const LearnerConfig& cfg) : t_burn_(cfg.t_burn) {
    if (!cfg.inner || !cfg.second)
      throw std::invalid_argument("composite learner: needs inner and second configs");
    first_ = make_learner(*cfg.inner);
    second_ = make_learner(*cfg.second);
  }

  void init(int action_count, long horizon_hint, std::uint64_t seed) override {
    first_->init(action_count, horizon_hint, splitmix64(seed));
    second_->init(action_count, horizon_hint, splitmix64(seed + 1));
  }

  std::vector<double> act(long t) override {
    return t <= t_burn_ ? first_->act(t) : second_->act(t);
  }

  void observe(const Observation& obs) override {
    first_->observe(obs);
    second_->observe(obs);
  }

  std::string kind() const override {
    return "composite(" + first_->kind() + "+" + second_->kind() + ")";
  }

 private:
  long t_burn_ = 0;
  std::unique_ptr<Learner> first_;
  std::unique_ptr<Learner> second_;
};

// Reduction from external to internal regret: one inner learner per own
// action; their recommendations form a stochastic matrix whose stationary
// distribution is played, and rewards are routed back scaled by the play
// probability of the owning action.
class SwapWrapper : public Learner {
 public:
  explicit SwapWrapper(const LearnerConfig& cfg) : cfg_(cfg) {}

  void init(int action_count, long horizon_hint, std::uint64_t seed) override {
    n_ = action_count;
    inner_.clear();
    LearnerConfig inner_cfg = cfg_.inner ? *cfg_.inner : LearnerConfig::of("mwu");
    inner_cfg.reward_bound = cfg_.reward_bound;
    for (int i = 0; i < n_; ++i) {
      inner_.push_back(make_learner(inner_cfg));
      inner_.back()->init(n_, horizon_hint, splitmix64(seed + i));
    }
    current_.assign(n_, 1.0 / n_);
  }

  std::vector<double> act(long t) override {
    std::vector<std::vector<double>> q(n_);
    for (int i = 0; i < n_; ++i) q[i] = inner_[i]->act(t);
    current_ = stationary(q);
    return current_;
  }

  void observe(const Observation& obs) override {
    Observation routed = obs;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < n_; ++k) routed.rewards[k] = current_[i] * obs.rewards[k];
      inner_[i]->observe(routed);
    }
  }

  std::string kind() const override { return "swap_wrapper"; }

  long fallback_count() const { return fallbacks_; }

 private:
  std::vector<double> stationary(const std::vector<std::vector<double>>& q) {
    // Solve pi Q = pi, sum pi = 1: rows of (Q^T - I) with the last equation
    // replaced by normalization. Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> a(n_, std::vector<double>(n_ + 1, 0.0));
    for (int r = 0; r < n_ - 1; ++r) {
      for (int c = 0; c < n_; ++c) a[r][c] = q[c][r] - (r == c ? 1.0 : 0.0);
    }
    for (int c = 0; c < n_; ++c) a[n_ - 1][c] = 1.0;
    a[n_ - 1][n_] = 1.0;
    bool ok = true;
    for (int col = 0; col < n_ && ok; ++col) {
      int piv = col;
      for (int r = col + 1; r < n_; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (std::abs(a[piv][col]) < 1e-13) { ok = false; break; }
      std::swap(a[col], a[piv]);
      for (int r = 0; r < n_; ++r) {
        if (r == col || a[r][col] == 0.0) continue;
        double f = a[r][col] / a[col][col];
        for (int c = col; c <= n_; ++c) a[r][c] -= f * a[col][c];
      }
    }
    std::vector<double> pi(n_);
    if (ok) {
      for (int i = 0; i < n_; ++i) {
        pi[i] = a[i][n_] / a[i][i];
        if (pi[i] < -1e-9) { ok = false; break; }
      }
    }
    if (!ok) {
      ++fallbacks_;
      pi.assign(n_, 1.0 / n_);
      std::vector<double> next(n_);
      for (int iter = 0; iter < 400; ++iter) {
        for (int c = 0; c < n_; ++c) {
          double acc = 0;
          for (int r = 0; r < n_; ++r) acc += pi[r] * q[r][c];
          next[c] = acc;
        }
        pi = next;
      }
    }
    double total = 0;
    for (auto& v : pi) {
      if (v < 0) v = 0;
      total += v;
    }
    if (total <= 0) return std::vector<double>(n_, 1.0 / n_);
    for (auto& v : pi) v /= total;
    return pi;
  }

  LearnerConfig cfg_;
  int n_ = 0;
  long fallbacks_ = 0;
  std::vector<std::unique_ptr<Learner>> inner_;
  std::vector<double> current_;
};

}  // namespace

std::unique_ptr<Learner> make_learner(const LearnerConfig& cfg) {
  if (cfg.kind == "mwu") return std::make_unique<MwuLearner>(cfg);
  if (cfg.kind == "rmbd") return std::make_unique<RmbdLearner>(cfg);
  if (cfg.kind == "ftl") return std::make_unique<FtlLearner>(cfg);
  if (cfg.kind == "br_oracle") return std::make_unique<BrOracleLearner>();
  if (cfg.kind == "fixed") return std::make_unique<FixedLearner>(cfg);
  if (cfg.kind == "composite") return std::make_unique<CompositeLearner>(cfg);
  if (cfg.kind == "interval_restart_mwu") return std::make_unique<IntervalRestartMwu>(cfg);
  if (cfg.kind == "swap_wrapper") return std::make_unique<SwapWrapper>(cfg);
  throw std::invalid_argument("make_learner: unknown kind '" + cfg.kind + "'");
}

std::vector<MeanBasedViolation> mean_based_audit(const Trajectory& traj, const Game& g,
                                                 Player player, double gamma) {
  std::vector<MeanBasedViolation> out;
  const long t_max = traj.rounds();
  const int k = g.actions(player);
  const double bound = g.utility_bound.to_double();
  const double slack = gamma * static_cast<double>(t_max);
  std::vector<double> sigma(k, 0.0);
  for (long t = 1; t < t_max; ++t) {
    auto r = observed_rewards(g, player, traj.steps[t - 1]);
    for (int i = 0; i < k; ++i) sigma[i] += rescale_reward(r[i], bound);
    int leader = argmax_index(sigma);
    const auto& strat = player == Player::A ? traj.steps[t].p : traj.steps[t].q;
    for (int i = 0; i < k; ++i) {
      if (sigma[i] <= sigma[leader] - slack && strat[i] > gamma)
        out.push_back({t + 1, i, leader, strat[i]});
    }
  }
  return out;
}

}  // namespace gamelab
