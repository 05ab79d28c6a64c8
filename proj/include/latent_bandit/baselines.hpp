#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "latent_bandit/env.hpp"
#include "latent_bandit/policy.hpp"
#include "latent_bandit/rng.hpp"

namespace latent_bandit {

// Lowest-index argmax; ties always resolve to the smallest arm.
Arm argmax_lowest(std::span<const double> values);

// ---------------------------------------------------------------------------
// UCB1

struct ArmStatistics {
  explicit ArmStatistics(std::size_t num_arms) : counts(num_arms, 0), sums(num_arms, 0.0) {}

  void record(Arm arm, double reward) {
    ++counts[arm];
    sums[arm] += reward;
  }
  double mean(Arm arm) const { return sums[arm] / static_cast<double>(counts[arm]); }
  std::size_t total() const;

  std::vector<std::size_t> counts;
  std::vector<double> sums;
};

/// Untried arms first (lowest index), then argmax of mean + sqrt(2 ln t / N).
/// `t` is the number of plays so far.
Arm ucb1_select(const ArmStatistics& stats, double t);

class Ucb1 final : public SingleUnitPolicy {
 public:
  explicit Ucb1(std::size_t num_arms) : stats_(num_arms) {}
  Arm select(Round t) override;
  void observe(Arm arm, double reward) override { stats_.record(arm, reward); }
  const ArmStatistics& stats() const { return stats_; }

 private:
  ArmStatistics stats_;
};

// ---------------------------------------------------------------------------
// Gaussian Thompson sampling with Normal-Gamma conjugate priors

struct NormalGammaPrior {
  double mean = 0.5;
  double kappa = 1.0;
  double shape = 1.0;
  double rate = 0.01;
};

class NormalGammaPosterior {
 public:
  explicit NormalGammaPosterior(NormalGammaPrior prior = {}) : prior_(prior) {}

  void observe(double reward);

  std::size_t count() const { return n_; }
  double kappa() const { return prior_.kappa + static_cast<double>(n_); }
  double mean() const;
  double shape() const { return prior_.shape + 0.5 * static_cast<double>(n_); }
  double rate() const;

  // Draw (mu, precision) from the posterior and return mu.
  double sample_mean(Rng& rng) const;

 private:
  NormalGammaPrior prior_;
  std::size_t n_ = 0;
  double data_mean_ = 0.0;
  double m2_ = 0.0;  // Welford sum of squared deviations
};

Arm gaussian_ts_select(std::span<const NormalGammaPosterior> posteriors, Rng& rng);

class GaussianThompson final : public SingleUnitPolicy {
 public:
  GaussianThompson(std::size_t num_arms, NormalGammaPrior prior, std::uint64_t seed);
  GaussianThompson(std::vector<NormalGammaPrior> priors, std::uint64_t seed);
  Arm select(Round t) override;
  void observe(Arm arm, double reward) override { posteriors_[arm].observe(reward); }
  const std::vector<NormalGammaPosterior>& posteriors() const { return posteriors_; }

 private:
  std::vector<NormalGammaPosterior> posteriors_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// EXP3 / EXP3-S

struct Exp3Weights {
  Exp3Weights(std::size_t num_arms, double gamma);

  std::vector<double> probabilities() const;

  std::vector<double> weights;
  double gamma;
};

Arm exp3_select(const Exp3Weights& w, Rng& rng);
/// Importance-weighted multiplicative update. Rewards are clipped to [0,1].
void exp3_observe(Exp3Weights& w, Arm arm, double reward);
/// EXP3 update followed by the additive share (e * alpha_s / K) * sum(w_prev).
void exp3s_observe(Exp3Weights& w, Arm arm, double reward, double alpha_s);

class Exp3 final : public SingleUnitPolicy {
 public:
  // alpha_s == 0 gives plain EXP3.
  Exp3(std::size_t num_arms, double gamma, double alpha_s, std::uint64_t seed);
  Arm select(Round t) override;
  void observe(Arm arm, double reward) override;
  const Exp3Weights& weights() const { return weights_; }

 private:
  Exp3Weights weights_;
  double alpha_s_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Sliding-window UCB

class SlidingWindowStats {
 public:
  SlidingWindowStats(std::size_t num_arms, std::size_t window);

  void record(Arm arm, Round t, double reward);
  // Drop observations older than the last `window` rounds as of round t.
  void expire(Round t);

  std::size_t window() const { return window_; }
  std::size_t count(Arm arm) const { return history_[arm].size(); }
  double mean(Arm arm) const;
  std::size_t num_arms() const { return history_.size(); }

 private:
  std::size_t window_;
  std::vector<std::deque<std::pair<Round, double>>> history_;
};

/// UCB1 index on windowed statistics, log term ln(min(plays, W)).
Arm swucb_select(SlidingWindowStats& stats, Round t, std::size_t plays);

class SlidingWindowUcb final : public SingleUnitPolicy {
 public:
  SlidingWindowUcb(std::size_t num_arms, std::size_t window) : stats_(num_arms, window) {}
  Arm select(Round t) override;
  void observe(Arm arm, double reward) override;
  const SlidingWindowStats& stats() const { return stats_; }

 private:
  SlidingWindowStats stats_;
  Round round_ = 0;
  std::size_t plays_ = 0;
};

// ---------------------------------------------------------------------------
// Discounted UCB

struct DiscountedStats {
  DiscountedStats(std::size_t num_arms, double discount);

  // Decay every arm by the discount, then credit the pulled arm.
  void record(Arm arm, double reward);
  double total() const;
  double mean(Arm arm) const { return sums[arm] / counts[arm]; }

  std::vector<double> counts;
  std::vector<double> sums;
  std::vector<bool> tried;
  double discount;
};

/// sqrt(2 ln(discounted total) / discounted N_a) bonus; untried arms first.
Arm ducb_select(const DiscountedStats& stats);

class DiscountedUcb final : public SingleUnitPolicy {
 public:
  DiscountedUcb(std::size_t num_arms, double discount) : stats_(num_arms, discount) {}
  Arm select(Round) override { return ducb_select(stats_); }
  void observe(Arm arm, double reward) override { stats_.record(arm, reward); }
  const DiscountedStats& stats() const { return stats_; }

 private:
  DiscountedStats stats_;
};

// ---------------------------------------------------------------------------
// Oracles and reference policies

/// argmax_a sum_s pi_s mu[s][a], lowest index on ties.
Arm oracle_single_arm(const RewardMatrix& rewards, std::span<const double> stationary);

Arm state_aware_oracle(const RewardMatrix& rewards, State s);

class FixedArm final : public SingleUnitPolicy {
 public:
  explicit FixedArm(Arm arm) : arm_(arm) {}
  Arm select(Round) override { return arm_; }
  void observe(Arm, double) override {}

 private:
  Arm arm_;
};

class StateAwareOracle final : public SingleUnitPolicy {
 public:
  explicit StateAwareOracle(RewardMatrix rewards) : rewards_(std::move(rewards)) {}
  void reveal_state(State s) override { state_ = s; }
  Arm select(Round) override { return state_aware_oracle(rewards_, state_); }
  void observe(Arm, double) override {}

 private:
  RewardMatrix rewards_;
  State state_ = 0;
};

class UniformRandom final : public SingleUnitPolicy {
 public:
  UniformRandom(std::size_t num_arms, std::uint64_t seed) : num_arms_(num_arms), rng_(seed) {}
  Arm select(Round) override { return rng_.uniform_index(num_arms_); }
  void observe(Arm, double) override {}

 private:
  std::size_t num_arms_;
  Rng rng_;
};

}  // namespace latent_bandit
