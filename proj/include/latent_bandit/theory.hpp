#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "latent_bandit/env.hpp"
#include "latent_bandit/policy.hpp"

namespace latent_bandit {

// Inputs of the periodic-probing regret bound.
struct ProbingBoundInputs {
  double delta_probe = 0.0;  // regret paid by one probe
  double delta_max = 1.0;    // largest single-round gap
  double q = 0.0;            // per-round switch probability bound
  Round tau = 1;             // probing interval
  double eps_fp = 0.0;       // probe misidentification probability
  Round horizon = 0;         // T; 0 means the T -> infinity limit
};

struct ProbingBound {
  double probe_term;      // delta_probe / tau
  double staleness_term;  // delta_max * q * tau / 2
  double misclass_term;   // delta_max * eps_fp
  double tail;            // delta_max * tau / T, the incomplete final block

  // The comparable per-round bound; the tail is reported, never folded in.
  double rate() const { return probe_term + staleness_term + misclass_term; }
};

ProbingBound regret_rate_bound(const ProbingBoundInputs& in);

struct OptimalTau {
  bool unbounded = false;  // q == 0: probing never pays for itself
  double continuous = 0.0; // sqrt(delta_probe / (delta_max * q))
  Round lower = 0;
  Round upper = 0;
  Round best = 0;          // whichever neighbour has the smaller bound
};

OptimalTau optimal_tau(double delta_probe, double delta_max, double q);

/// Probe cost of a sequential probe averaged over the stationary law:
/// sum_s pi_s (gap(s,0) + gap(s,1)).
double natural_probe_cost(const RewardMatrix& rewards, std::span<const double> stationary);

struct IdealizedProbingParams {
  Round tau = 10;
  Round horizon = 20000;
  double delta_probe = 0.5;
  double eps_fp = 0.0;
};

// Per-round regret rates. total == probe_cost + staleness + misclassification.
struct IdealizedProbingResult {
  double rate = 0.0;
  double probe_cost = 0.0;
  double staleness = 0.0;
  double misclassification = 0.0;
  Round probes = 0;
  Round probe_rounds = 0;
  Round stale_rounds = 0;
  Round misclassified_rounds = 0;
};

/// Idealized periodic probing on a two-state chain. Time is cut into blocks of
/// length tau; the first round of each block is a probe that costs
/// delta_probe and reports the current optimal arm (wrong with probability
/// eps_fp). The rest of the block exploits that report. Exploit regret goes
/// to `misclassification` when the block's probe was wrong, else to
/// `staleness`.
IdealizedProbingResult simulate_idealized_probing(const RewardMatrix& rewards,
                                                  const TransitionMatrix& transitions,
                                                  const IdealizedProbingParams& params,
                                                  std::uint64_t seed);

// Mean and standard error over seeds for one (tau, q, eps) point.
struct ProbingGridPoint {
  Round tau;
  double q;
  double eps_fp;
  double bound;
  double tail;
  double measured;
  double probe_cost;
  double staleness;
  double misclassification;
  double stderr_measured;
};

ProbingGridPoint evaluate_probing_point(const RewardMatrix& rewards, double q,
                                        const IdealizedProbingParams& params,
                                        std::size_t num_seeds, std::uint64_t root_seed);

}  // namespace latent_bandit
