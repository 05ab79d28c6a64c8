#include "latent_bandit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace latent_bandit {

Arm argmax_lowest(std::span<const double> values) {
  Arm best = 0;
  for (Arm a = 1; a < values.size(); ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

namespace {

constexpr double kWeightCeiling = 1e100;

template <typename Count>
std::optional<Arm> first_untried(const std::vector<Count>& counts) {
  for (Arm a = 0; a < counts.size(); ++a) {
    if (counts[a] == 0) return a;
  }
  return std::nullopt;
}

}  // namespace

// -- UCB1 --------------------------------------------------------------------

std::size_t ArmStatistics::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Arm ucb1_select(const ArmStatistics& stats, double t) {
  if (auto a = first_untried(stats.counts)) return *a;
  const double log_t = std::log(t);
  std::vector<double> index(stats.counts.size());
  for (Arm a = 0; a < index.size(); ++a) {
    index[a] = stats.mean(a) + std::sqrt(2.0 * log_t / static_cast<double>(stats.counts[a]));
  }
  return argmax_lowest(index);
}

Arm Ucb1::select(Round) { return ucb1_select(stats_, static_cast<double>(stats_.total())); }

// -- Thompson sampling -------------------------------------------------------

void NormalGammaPosterior::observe(double reward) {
  ++n_;
  const double delta = reward - data_mean_;
  data_mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (reward - data_mean_);
}

double NormalGammaPosterior::mean() const {
  const double n = static_cast<double>(n_);
  return (prior_.kappa * prior_.mean + n * data_mean_) / (prior_.kappa + n);
}

double NormalGammaPosterior::rate() const {
  const double n = static_cast<double>(n_);
  const double shift = data_mean_ - prior_.mean;
  return prior_.rate + 0.5 * m2_ + prior_.kappa * n * shift * shift / (2.0 * (prior_.kappa + n));
}

double NormalGammaPosterior::sample_mean(Rng& rng) const {
  const double precision = rng.gamma(shape(), rate());
  return mean() + rng.normal() / std::sqrt(kappa() * precision);
}

Arm gaussian_ts_select(std::span<const NormalGammaPosterior> posteriors, Rng& rng) {
  std::vector<double> draws(posteriors.size());
  for (Arm a = 0; a < draws.size(); ++a) draws[a] = posteriors[a].sample_mean(rng);
  return argmax_lowest(draws);
}

GaussianThompson::GaussianThompson(std::size_t num_arms, NormalGammaPrior prior,
                                   std::uint64_t seed)
    : posteriors_(num_arms, NormalGammaPosterior(prior)), rng_(seed) {}

GaussianThompson::GaussianThompson(std::vector<NormalGammaPrior> priors, std::uint64_t seed)
    : rng_(seed) {
  for (const auto& p : priors) posteriors_.emplace_back(p);
}

Arm GaussianThompson::select(Round) { return gaussian_ts_select(posteriors_, rng_); }

// -- EXP3 --------------------------------------------------------------------

Exp3Weights::Exp3Weights(std::size_t num_arms, double g) : weights(num_arms, 1.0), gamma(g) {
  if (num_arms == 0) throw std::invalid_argument("EXP3 needs at least one arm");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("EXP3 gamma must lie in (0,1]");
}

std::vector<double> Exp3Weights::probabilities() const {
  const double k = static_cast<double>(weights.size());
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> p(weights.size());
  for (Arm a = 0; a < p.size(); ++a) p[a] = (1.0 - gamma) * weights[a] / total + gamma / k;
  return p;
}

Arm exp3_select(const Exp3Weights& w, Rng& rng) {
  const auto p = w.probabilities();
  const double u = rng.uniform();
  double acc = 0.0;
  for (Arm a = 0; a < p.size(); ++a) {
    acc += p[a];
    if (u < acc) return a;
  }
  return p.size() - 1;
}

namespace {

void renormalize_if_needed(Exp3Weights& w) {
  const double top = *std::max_element(w.weights.begin(), w.weights.end());
  if (top > kWeightCeiling) {
    for (double& x : w.weights) x /= top;
  }
}

}  // namespace

void exp3_observe(Exp3Weights& w, Arm arm, double reward) {
  const double clipped = std::clamp(reward, 0.0, 1.0);
  const double p = w.probabilities()[arm];
  const double k = static_cast<double>(w.weights.size());
  w.weights[arm] *= std::exp(w.gamma * (clipped / p) / k);
  renormalize_if_needed(w);
}

void exp3s_observe(Exp3Weights& w, Arm arm, double reward, double alpha_s) {
  const double previous_total = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
  const double clipped = std::clamp(reward, 0.0, 1.0);
  const double p = w.probabilities()[arm];
  const double k = static_cast<double>(w.weights.size());
  w.weights[arm] *= std::exp(w.gamma * (clipped / p) / k);
  const double share = std::numbers::e * alpha_s / k * previous_total;
  for (double& x : w.weights) x += share;
  renormalize_if_needed(w);
}

Exp3::Exp3(std::size_t num_arms, double gamma, double alpha_s, std::uint64_t seed)
    : weights_(num_arms, gamma), alpha_s_(alpha_s), rng_(seed) {
  if (alpha_s < 0.0) throw std::invalid_argument("EXP3-S alpha_s must be >= 0");
}

Arm Exp3::select(Round) { return exp3_select(weights_, rng_); }

void Exp3::observe(Arm arm, double reward) {
  if (alpha_s_ > 0.0) {
    exp3s_observe(weights_, arm, reward, alpha_s_);
  } else {
    exp3_observe(weights_, arm, reward);
  }
}

// -- SW-UCB ------------------------------------------------------------------

SlidingWindowStats::SlidingWindowStats(std::size_t num_arms, std::size_t window)
    : window_(window), history_(num_arms) {
  if (window == 0) throw std::invalid_argument("SW-UCB window must be >= 1");
}

void SlidingWindowStats::record(Arm arm, Round t, double reward) {
  auto& h = history_[arm];
  h.emplace_back(t, reward);
  if (h.size() > window_) h.pop_front();
}

void SlidingWindowStats::expire(Round t) {
  const Round oldest = t - static_cast<Round>(window_);
  for (auto& h : history_) {
    while (!h.empty() && h.front().first <= oldest) h.pop_front();
  }
}

double SlidingWindowStats::mean(Arm arm) const {
  const auto& h = history_[arm];
  double sum = 0.0;
  for (const auto& [round, reward] : h) sum += reward;
  return sum / static_cast<double>(h.size());
}

Arm swucb_select(SlidingWindowStats& stats, Round t, std::size_t plays) {
  stats.expire(t);
  for (Arm a = 0; a < stats.num_arms(); ++a) {
    if (stats.count(a) == 0) return a;
  }
  const double log_n = std::log(static_cast<double>(std::min(plays, stats.window())));
  std::vector<double> index(stats.num_arms());
  for (Arm a = 0; a < index.size(); ++a) {
    index[a] = stats.mean(a) + std::sqrt(2.0 * log_n / static_cast<double>(stats.count(a)));
  }
  return argmax_lowest(index);
}

Arm SlidingWindowUcb::select(Round t) {
  round_ = t;
  return swucb_select(stats_, t, plays_);
}

void SlidingWindowUcb::observe(Arm arm, double reward) {
  stats_.record(arm, round_, reward);
  ++plays_;
}

// -- D-UCB -------------------------------------------------------------------

DiscountedStats::DiscountedStats(std::size_t num_arms, double d)
    : counts(num_arms, 0.0), sums(num_arms, 0.0), tried(num_arms, false), discount(d) {
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw std::invalid_argument("D-UCB discount must lie in (0,1]");
  }
}

void DiscountedStats::record(Arm arm, double reward) {
  for (Arm a = 0; a < counts.size(); ++a) {
    counts[a] *= discount;
    sums[a] *= discount;
  }
  counts[arm] += 1.0;
  sums[arm] += reward;
  tried[arm] = true;
}

double DiscountedStats::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

Arm ducb_select(const DiscountedStats& stats) {
  for (Arm a = 0; a < stats.tried.size(); ++a) {
    if (!stats.tried[a]) return a;
  }
  const double log_n = std::log(stats.total());
  std::vector<double> index(stats.counts.size());
  for (Arm a = 0; a < index.size(); ++a) {
    index[a] = stats.mean(a) + std::sqrt(2.0 * std::max(log_n, 0.0) / stats.counts[a]);
  }
  return argmax_lowest(index);
}

// -- Oracles -----------------------------------------------------------------

Arm oracle_single_arm(const RewardMatrix& rewards, std::span<const double> stationary) {
  if (stationary.size() != rewards.num_states()) {
    throw std::invalid_argument("stationary distribution size does not match S");
  }
  std::vector<double> value(rewards.num_arms(), 0.0);
  for (State s = 0; s < rewards.num_states(); ++s) {
    for (Arm a = 0; a < rewards.num_arms(); ++a) value[a] += stationary[s] * rewards.mean(s, a);
  }
  return argmax_lowest(value);
}

Arm state_aware_oracle(const RewardMatrix& rewards, State s) { return rewards.optimal_arm(s); }

}  // namespace latent_bandit
