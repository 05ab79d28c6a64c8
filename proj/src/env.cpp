#include "latent_bandit/env.hpp"

#include <algorithm>
#include <cmath>

namespace latent_bandit {

RewardMatrix::RewardMatrix(std::size_t num_states, std::size_t num_arms, std::vector<double> means)
    : num_states_(num_states), num_arms_(num_arms), means_(std::move(means)) {
  if (num_states_ == 0 || num_arms_ == 0) {
    throw std::invalid_argument("reward matrix needs at least one state and one arm");
  }
  if (means_.size() != num_states_ * num_arms_) {
    throw std::invalid_argument("reward matrix size does not match S x K");
  }
  for (double m : means_) {
    if (!(m >= 0.0 && m <= 1.0)) {
      throw std::invalid_argument("mean rewards must lie in [0,1]");
    }
  }
  optimal_.resize(num_states_);
  for (State s = 0; s < num_states_; ++s) {
    auto r = row(s);
    optimal_[s] = static_cast<Arm>(std::max_element(r.begin(), r.end()) - r.begin());
  }
}

RewardMatrix RewardMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("reward matrix needs at least one state");
  std::vector<double> flat;
  const std::size_t k = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != k) throw std::invalid_argument("ragged reward matrix");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return RewardMatrix(rows.size(), k, std::move(flat));
}

double RewardMatrix::max_gap() const {
  double best = 0.0;
  for (State s = 0; s < num_states_; ++s) {
    for (Arm a = 0; a < num_arms_; ++a) best = std::max(best, gap(s, a));
  }
  return best;
}

TransitionMatrix::TransitionMatrix(std::size_t num_states, std::vector<double> probs)
    : num_states_(num_states), probs_(std::move(probs)) {
  if (num_states_ == 0) throw std::invalid_argument("transition matrix needs S >= 1");
  if (probs_.size() != num_states_ * num_states_) {
    throw std::invalid_argument("transition matrix must be S x S");
  }
  for (State i = 0; i < num_states_; ++i) {
    double sum = 0.0;
    for (double p : row(i)) {
      if (!(p >= 0.0)) throw std::invalid_argument("transition probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("transition matrix rows must sum to 1");
    }
  }
}

State TransitionMatrix::sample_next(State from, Rng& rng) const {
  const double u = rng.uniform();
  auto r = row(from);
  double acc = 0.0;
  for (State j = 0; j < num_states_; ++j) {
    acc += r[j];
    if (u < acc) return j;
  }
  // u landed in the rounding slack above the last cumulative sum.
  for (State j = num_states_; j-- > 0;) {
    if (r[j] > 0.0) return j;
  }
  return from;
}

TransitionMatrix make_transition_matrix(std::size_t num_states, double p_stay) {
  if (num_states == 0) throw std::invalid_argument("S must be >= 1");
  if (!(p_stay >= 0.0 && p_stay <= 1.0)) throw std::invalid_argument("p_stay must lie in [0,1]");
  if (num_states == 1) return TransitionMatrix(1, {1.0});
  const double off = (1.0 - p_stay) / static_cast<double>(num_states - 1);
  std::vector<double> probs(num_states * num_states, off);
  for (State i = 0; i < num_states; ++i) probs[i * num_states + i] = p_stay;
  return TransitionMatrix(num_states, std::move(probs));
}

namespace {

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t n) {
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  }
  return c;
}

double row_spread(const std::vector<double>& m, std::size_t n) {
  double spread = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double lo = m[j], hi = m[j];
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, m[i * n + j]);
      hi = std::max(hi, m[i * n + j]);
    }
    spread = std::max(spread, hi - lo);
  }
  return spread;
}

}  // namespace

std::vector<double> stationary_distribution(const TransitionMatrix& transitions) {
  const std::size_t n = transitions.num_states();
  std::vector<double> power = transitions.values();
  // 2^64 steps is far beyond any mixing time we can represent.
  for (int i = 0; i < 64 && row_spread(power, n) > 1e-12; ++i) {
    power = multiply(power, power, n);
  }
  if (row_spread(power, n) > 1e-12) {
    throw NoStationaryDistribution("Markov chain has no unique stationary distribution");
  }
  std::vector<double> pi(power.begin(), power.begin() + static_cast<std::ptrdiff_t>(n));
  double total = 0.0;
  for (double& p : pi) {
    p = std::max(p, 0.0);
    total += p;
  }
  for (double& p : pi) p /= total;
  return pi;
}

RewardMatrix sample_instance(std::size_t num_states, std::size_t num_arms, std::uint64_t seed) {
  if (num_states == 0 || num_arms == 0) throw std::invalid_argument("S and K must be >= 1");
  Rng rng(derive_seed(seed, "instance"));
  std::vector<double> means(num_states * num_arms);
  for (double& m : means) m = rng.uniform();
  return RewardMatrix(num_states, num_arms, std::move(means));
}

Environment::Environment(RewardMatrix rewards, TransitionMatrix transitions, double noise_sd,
                         std::uint64_t seed, DualNoise dual_noise)
    : rewards_(std::move(rewards)),
      transitions_(std::move(transitions)),
      noise_sd_(noise_sd),
      dual_noise_(dual_noise),
      state_rng_(derive_seed(seed, "state")),
      noise_rng_(derive_seed(seed, "noise")) {
  if (rewards_.num_states() != transitions_.num_states()) {
    throw std::invalid_argument("reward and transition matrices disagree on S");
  }
  if (!(noise_sd_ >= 0.0)) throw std::invalid_argument("noise_sd must be >= 0");
  state_ = state_rng_.uniform_index(rewards_.num_states());
}

double Environment::dual_unit_noise_sd() const {
  return dual_noise_ == DualNoise::kPerUnitDoubled ? noise_sd_ * std::sqrt(2.0) : noise_sd_;
}

void Environment::set_state(State s) {
  if (s >= rewards_.num_states()) throw std::invalid_argument("state out of range");
  state_ = s;
}

void Environment::check_arm(Arm arm) const {
  if (arm >= rewards_.num_arms()) throw std::invalid_argument("arm index out of range");
}

SingleStep Environment::step_single(Arm arm) {
  check_arm(arm);
  const State s = state_;
  SingleStep out{rewards_.mean(s, arm) + noise_sd_ * noise_rng_.normal(), s,
                 rewards_.optimal_arm(s), rewards_.gap(s, arm)};
  state_ = transitions_.sample_next(s, state_rng_);
  return out;
}

DualStep Environment::step_dual(Arm control, Arm treatment) {
  check_arm(control);
  check_arm(treatment);
  const State s = state_;
  const double sd = dual_unit_noise_sd();
  DualStep out{};
  out.control_reward = rewards_.mean(s, control) + sd * noise_rng_.normal();
  out.treatment_reward = rewards_.mean(s, treatment) + sd * noise_rng_.normal();
  out.true_state = s;
  out.optimal_arm = rewards_.optimal_arm(s);
  out.control_gap = rewards_.gap(s, control);
  out.treatment_gap = rewards_.gap(s, treatment);
  state_ = transitions_.sample_next(s, state_rng_);
  return out;
}

}  // namespace latent_bandit
