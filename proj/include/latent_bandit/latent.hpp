#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "latent_bandit/linmodel.hpp"
#include "latent_bandit/policy.hpp"
#include "latent_bandit/rng.hpp"

namespace latent_bandit {

// Previous action-reward pair, fed back as context.
struct LaggedContext {
  Arm prev_action = 0;
  double prev_reward = 0.0;
};

// Joint reward pair from the most recent completed probe.
struct Fingerprint {
  double r0 = 0.0;
  double r1 = 0.0;
  Round captured_at = 0;
};

/// [1, onehot(a), r, onehot(a) * r], dimension 2K + 2.
ContextVector lagged_features(const LaggedContext& ctx, std::size_t num_arms);

/// [r0_fp, r1_fp] followed by lagged_features, dimension 2K + 4.
ContextVector combined_features(const Fingerprint& fp, const LaggedContext& ctx,
                                std::size_t num_arms);

inline std::size_t lagged_dim(std::size_t num_arms) { return 2 * num_arms + 2; }
inline std::size_t combined_dim(std::size_t num_arms) { return 2 * num_arms + 4; }

struct LinUcbParams {
  double alpha = 1.0;
  double reg = 1.0;
};

// ---------------------------------------------------------------------------
// Adaptive probe trigger

struct GateConfig {
  double z_thresh = 2.0;
  double sigma0 = 0.05;   // residual noise floor (a standard deviation)
  double m_thresh = 0.05;
  double lambda_h = 0.05;  // hazard rate per round
  double delta_h = 0.5;
  Round tau_min = 5;

  void validate() const;
};

// One-step-ahead prediction made for the arm that ended up recorded as
// a_{t-1}, and the reward it produced.
struct ResidualInput {
  double reward;
  double predicted;
  double variance;
};

struct GateInputs {
  Round t;
  Round last_probe;
  std::optional<ResidualInput> last;  // empty on round 1
  double ucb0;
  double ucb1;
};

struct GateDecision {
  bool residual = false;
  bool uncertainty = false;
  bool hazard = false;
  bool spacing_ok = false;
  double z = 0.0;
  double margin = 0.0;

  bool probe() const { return (residual || uncertainty || hazard) && spacing_ok; }
};

/// Residual, uncertainty and staleness gates, OR-combined and subject to the
/// minimum inter-probe gap. Comparisons are inclusive.
GateDecision compute_gates(const GateConfig& cfg, const GateInputs& in);

// ---------------------------------------------------------------------------
// Shared LinUCB machinery

class LinUcbArms {
 public:
  LinUcbArms(std::size_t num_arms, std::size_t dim, LinUcbParams params);

  std::size_t num_arms() const { return models_.size(); }
  const LinUcbParams& params() const { return params_; }
  const ArmLinearModel& model(Arm a) const { return models_[a]; }
  std::size_t total_updates() const;

  std::vector<double> scores(const ContextVector& x) const;
  void update(Arm a, const ContextVector& x, double reward);

 private:
  std::vector<ArmLinearModel> models_;
  LinUcbParams params_;
};

/// LinUCB on lagged (action, reward) features. Works for any K.
class LcUcb final : public SingleUnitPolicy {
 public:
  LcUcb(std::size_t num_arms, LinUcbParams params = {});

  Arm select(Round t) override;
  void observe(Arm arm, double reward) override;

  const LinUcbArms& arms() const { return arms_; }
  const LaggedContext& context() const { return ctx_; }

 private:
  LinUcbArms arms_;
  LaggedContext ctx_;
  ContextVector phi_;
  std::optional<Arm> pending_;
};

/// Linear Thompson sampling on the LC-UCB features.
class LcThompson final : public SingleUnitPolicy {
 public:
  LcThompson(std::size_t num_arms, LinUcbParams params, double noise_scale, std::uint64_t seed);

  Arm select(Round t) override;
  void observe(Arm arm, double reward) override;

  const LinUcbArms& arms() const { return arms_; }

 private:
  LinUcbArms arms_;
  double noise_scale_;
  Rng rng_;
  LaggedContext ctx_;
  ContextVector phi_;
  std::optional<Arm> pending_;
};

// ---------------------------------------------------------------------------
// Dual-unit probing: RP-UCB (fixed schedule) and AdaRP-UCB (gated).

class RandomizedProbingUcb final : public DualUnitPolicy {
 public:
  // Fixed schedule: probe when t mod tau == 0.
  RandomizedProbingUcb(LinUcbParams params, Round tau);
  // Gated trigger.
  RandomizedProbingUcb(LinUcbParams params, GateConfig gates);

  ArmPair select(Round t) override;
  void observe(ArmPair arms, double control_reward, double treatment_reward) override;
  Arm recorded_arm() const override { return ctx_.prev_action; }
  bool last_was_probe() const override { return probing_; }
  std::optional<ProbeTrace> trace() const override { return trace_; }

  bool adaptive() const { return gates_.has_value(); }
  const Fingerprint& fingerprint() const { return fp_; }
  const LaggedContext& context() const { return ctx_; }
  const LinUcbArms& arms() const { return arms_; }
  Round last_probe() const { return last_probe_; }

 private:
  LinUcbArms arms_;
  Round tau_ = 0;
  std::optional<GateConfig> gates_;

  Fingerprint fp_;
  LaggedContext ctx_;
  Round last_probe_ = 0;
  std::optional<ResidualInput> last_residual_;

  Round round_ = 0;
  bool probing_ = false;
  bool pending_ = false;
  ContextVector phi_;
  std::array<Prediction, 2> predictions_{};
  ProbeTrace trace_;
};

// ---------------------------------------------------------------------------
// Single-unit probing: SP-UCB (fixed schedule) and AdaSP-UCB (gated).

class SequentialProbingUcb final : public SingleUnitPolicy {
 public:
  enum class Mode { kExploit, kProbe };

  // Fixed schedule: rounds with t mod tau in {0, 1} probe arm (t mod tau).
  SequentialProbingUcb(LinUcbParams params, Round tau);
  // Gated trigger with the two-round probe phase machine.
  SequentialProbingUcb(LinUcbParams params, GateConfig gates);

  Arm select(Round t) override;
  void observe(Arm arm, double reward) override;
  bool last_was_probe() const override { return probing_; }
  std::optional<ProbeTrace> trace() const override { return trace_; }

  bool adaptive() const { return gates_.has_value(); }
  Mode mode() const { return mode_; }
  Arm probe_arm() const { return probe_arm_; }
  const Fingerprint& fingerprint() const { return fp_; }
  const LaggedContext& context() const { return ctx_; }
  const LinUcbArms& arms() const { return arms_; }
  Round last_probe() const { return last_probe_; }

 private:
  LinUcbArms arms_;
  Round tau_ = 0;
  std::optional<GateConfig> gates_;

  Fingerprint fp_;
  LaggedContext ctx_;
  Round last_probe_ = 0;
  std::optional<ResidualInput> last_residual_;
  Mode mode_ = Mode::kExploit;
  Arm probe_arm_ = 0;

  Round round_ = 0;
  bool probing_ = false;
  bool pending_ = false;
  ContextVector phi_;
  std::array<Prediction, 2> predictions_{};
  ProbeTrace trace_;
};

}  // namespace latent_bandit
