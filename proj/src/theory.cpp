#include "latent_bandit/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latent_bandit/rng.hpp"

namespace latent_bandit {

ProbingBound regret_rate_bound(const ProbingBoundInputs& in) {
  if (in.tau <= 0) throw std::invalid_argument("probing interval tau must be >= 1");
  if (in.delta_probe < 0.0 || in.delta_max < 0.0 || in.q < 0.0 || in.horizon < 0) {
    throw std::invalid_argument("bound inputs must be non-negative");
  }
  if (in.delta_max > 1.0) throw std::invalid_argument("delta_max must be <= 1");
  if (in.eps_fp < 0.0 || in.eps_fp > 1.0) throw std::invalid_argument("eps_fp must lie in [0,1]");
  const double tau = static_cast<double>(in.tau);
  ProbingBound b{};
  b.probe_term = in.delta_probe / tau;
  b.staleness_term = in.delta_max * in.q * tau / 2.0;
  b.misclass_term = in.delta_max * in.eps_fp;
  b.tail = in.horizon > 0 ? in.delta_max * tau / static_cast<double>(in.horizon) : 0.0;
  return b;
}

OptimalTau optimal_tau(double delta_probe, double delta_max, double q) {
  if (!(delta_max > 0.0)) throw std::invalid_argument("delta_max must be > 0");
  if (delta_probe < 0.0 || q < 0.0) throw std::invalid_argument("inputs must be non-negative");
  OptimalTau out;
  if (q == 0.0) {
    out.unbounded = true;
    out.continuous = std::numeric_limits<double>::infinity();
    return out;
  }
  out.continuous = std::sqrt(delta_probe / (delta_max * q));
  out.lower = std::max<Round>(1, static_cast<Round>(std::floor(out.continuous)));
  out.upper = std::max<Round>(1, static_cast<Round>(std::ceil(out.continuous)));
  const auto rate_at = [&](Round tau) {
    return regret_rate_bound({delta_probe, delta_max, q, tau, 0.0, 0}).rate();
  };
  out.best = rate_at(out.upper) < rate_at(out.lower) ? out.upper : out.lower;
  return out;
}

double natural_probe_cost(const RewardMatrix& rewards, std::span<const double> stationary) {
  if (rewards.num_arms() < 2) throw std::invalid_argument("probing needs two arms");
  if (stationary.size() != rewards.num_states()) {
    throw std::invalid_argument("stationary distribution size does not match S");
  }
  double cost = 0.0;
  for (State s = 0; s < rewards.num_states(); ++s) {
    cost += stationary[s] * (rewards.gap(s, 0) + rewards.gap(s, 1));
  }
  return cost;
}

namespace {

void check_hypothesis(const RewardMatrix& rewards) {
  if (rewards.num_states() != 2) {
    throw std::invalid_argument("idealized probing requires exactly two states");
  }
  for (State s = 0; s < 2; ++s) {
    const Arm best = rewards.optimal_arm(s);
    for (Arm a = 0; a < rewards.num_arms(); ++a) {
      if (a != best && rewards.mean(s, a) == rewards.mean(s, best)) {
        throw std::invalid_argument("each state needs a unique optimal arm");
      }
    }
  }
}

}  // namespace

IdealizedProbingResult simulate_idealized_probing(const RewardMatrix& rewards,
                                                  const TransitionMatrix& transitions,
                                                  const IdealizedProbingParams& params,
                                                  std::uint64_t seed) {
  check_hypothesis(rewards);
  if (params.tau < 1) throw std::invalid_argument("probing interval tau must be >= 1");
  if (params.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (params.eps_fp < 0.0 || params.eps_fp > 1.0) {
    throw std::invalid_argument("eps_fp must lie in [0,1]");
  }

  // Noise is irrelevant here: regret is accounted on means.
  Environment env(rewards, transitions, 0.0, seed);
  Rng probe_rng(derive_seed(seed, "probe"));
  const std::size_t k = rewards.num_arms();

  IdealizedProbingResult out;
  double total = 0.0;
  Arm estimate = 0;
  bool misclassified = false;
  for (Round t = 1; t <= params.horizon; ++t) {
    const State s = env.current_state();
    if ((t - 1) % params.tau == 0) {
      const Arm truth = rewards.optimal_arm(s);
      misclassified = probe_rng.uniform() < params.eps_fp;
      if (misclassified) {
        // Uniform over the wrong arms.
        const Arm offset = 1 + probe_rng.uniform_index(k - 1);
        estimate = (truth + offset) % k;
      } else {
        estimate = truth;
      }
      env.step_single(truth);
      out.probe_cost += params.delta_probe;
      total += params.delta_probe;
      ++out.probes;
      ++out.probe_rounds;
      continue;
    }
    const double regret = env.step_single(estimate).gap;
    total += regret;
    if (misclassified) {
      out.misclassification += regret;
      ++out.misclassified_rounds;
    } else {
      out.staleness += regret;
      ++out.stale_rounds;
    }
  }
  const double horizon = static_cast<double>(params.horizon);
  out.rate = total / horizon;
  out.probe_cost /= horizon;
  out.staleness /= horizon;
  out.misclassification /= horizon;
  return out;
}

ProbingGridPoint evaluate_probing_point(const RewardMatrix& rewards, double q,
                                        const IdealizedProbingParams& params,
                                        std::size_t num_seeds, std::uint64_t root_seed) {
  if (num_seeds == 0) throw std::invalid_argument("need at least one seed");
  const auto transitions = make_transition_matrix(2, 1.0 - q);
  const auto bound =
      regret_rate_bound({params.delta_probe, rewards.max_gap(), q, params.tau, params.eps_fp,
                         params.horizon});

  ProbingGridPoint p{params.tau, q, params.eps_fp, bound.rate(), bound.tail, 0, 0, 0, 0, 0};
  std::vector<double> rates(num_seeds);
  for (std::size_t i = 0; i < num_seeds; ++i) {
    // Seeds do not depend on tau, so neighbouring tau values share randomness.
    const auto r = simulate_idealized_probing(rewards, transitions, params,
                                              derive_seed(root_seed, static_cast<std::uint64_t>(i)));
    rates[i] = r.rate;
    p.probe_cost += r.probe_cost;
    p.staleness += r.staleness;
    p.misclassification += r.misclassification;
  }
  const double n = static_cast<double>(num_seeds);
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  p.measured = mean;
  p.probe_cost /= n;
  p.staleness /= n;
  p.misclassification /= n;
  p.stderr_measured = num_seeds > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  return p;
}

}  // namespace latent_bandit
