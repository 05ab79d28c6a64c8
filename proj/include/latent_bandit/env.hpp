#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "latent_bandit/rng.hpp"

namespace latent_bandit {

using Arm = std::size_t;
using State = std::size_t;

// Mean rewards mu[s][a], stored row-major (one row per hidden state).
class RewardMatrix {
 public:
  RewardMatrix(std::size_t num_states, std::size_t num_arms, std::vector<double> means);

  static RewardMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_arms() const { return num_arms_; }

  double mean(State s, Arm a) const { return means_[s * num_arms_ + a]; }
  std::span<const double> row(State s) const {
    return {means_.data() + s * num_arms_, num_arms_};
  }
  const std::vector<double>& values() const { return means_; }

  // Lowest-index argmax of the state's row.
  Arm optimal_arm(State s) const { return optimal_[s]; }
  double gap(State s, Arm a) const { return mean(s, optimal_[s]) - mean(s, a); }
  double max_gap() const;

  bool operator==(const RewardMatrix&) const = default;

 private:
  std::size_t num_states_;
  std::size_t num_arms_;
  std::vector<double> means_;
  std::vector<Arm> optimal_;
};

// Row-stochastic Markov kernel over hidden states.
class TransitionMatrix {
 public:
  TransitionMatrix(std::size_t num_states, std::vector<double> probs);

  std::size_t num_states() const { return num_states_; }
  double prob(State from, State to) const { return probs_[from * num_states_ + to]; }
  std::span<const double> row(State s) const {
    return {probs_.data() + s * num_states_, num_states_};
  }
  const std::vector<double>& values() const { return probs_; }

  State sample_next(State from, Rng& rng) const;

 private:
  std::size_t num_states_;
  std::vector<double> probs_;
};

class NoStationaryDistribution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagonal p_stay, remaining mass spread uniformly over the other states.
/// With S = 1 the chain is the trivial [[1]] and p_stay is ignored.
TransitionMatrix make_transition_matrix(std::size_t num_states, double p_stay);

/// Stationary distribution by repeated squaring of P until all rows agree.
/// Throws NoStationaryDistribution when the rows never converge (reducible or
/// periodic chains, e.g. p_stay = 1 with S > 1).
std::vector<double> stationary_distribution(const TransitionMatrix& transitions);

/// Means drawn i.i.d. Uniform[0,1] from a stream seeded by `seed`.
RewardMatrix sample_instance(std::size_t num_states, std::size_t num_arms, std::uint64_t seed);

// How the dual-unit protocol scales observation noise.
enum class DualNoise {
  kPerUnitDoubled,  // each unit has variance 2 sigma^2
  kSplitTotal,      // total 2 sigma^2 split evenly, sigma^2 per unit
};

struct SingleStep {
  double reward;
  State true_state;
  Arm optimal_arm;
  double gap;
};

struct DualStep {
  double control_reward;
  double treatment_reward;
  State true_state;
  Arm optimal_arm;
  double control_gap;
  double treatment_gap;
};

// Latent-state bandit simulator. The hidden chain and the observation noise
// draw from separate sub-streams of the seed, so the state trajectory depends
// only on the seed and never on the arms played.
class Environment {
 public:
  Environment(RewardMatrix rewards, TransitionMatrix transitions, double noise_sd,
              std::uint64_t seed, DualNoise dual_noise = DualNoise::kPerUnitDoubled);

  const RewardMatrix& rewards() const { return rewards_; }
  const TransitionMatrix& transitions() const { return transitions_; }
  double noise_sd() const { return noise_sd_; }
  double dual_unit_noise_sd() const;
  State current_state() const { return state_; }
  std::size_t num_arms() const { return rewards_.num_arms(); }

  // Test hook: place the chain in a given state.
  void set_state(State s);

  /// Reward from the current state, then one Markov transition.
  SingleStep step_single(Arm arm);
  /// Both units see the same state; the chain advances once.
  DualStep step_dual(Arm control, Arm treatment);

 private:
  void check_arm(Arm arm) const;

  RewardMatrix rewards_;
  TransitionMatrix transitions_;
  double noise_sd_;
  DualNoise dual_noise_;
  Rng state_rng_;
  Rng noise_rng_;
  State state_ = 0;
};

// A replayable problem instance.
struct Instance {
  RewardMatrix rewards;
  double p_stay;
  double sigma;
  std::uint64_t seed;
};

}  // namespace latent_bandit
