#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "latent_bandit/env.hpp"

namespace latent_bandit {

using Round = std::int64_t;  // 1-based round index t

struct ArmPair {
  Arm control;
  Arm treatment;
  bool operator==(const ArmPair&) const = default;
};

// Per-round diagnostics from the probing policies.
struct ProbeTrace {
  bool probe = false;
  bool gate_residual = false;
  bool gate_uncertainty = false;
  bool gate_hazard = false;
  double fingerprint0 = 0.0;
  double fingerprint1 = 0.0;
  double margin = 0.0;
  double residual = 0.0;
};

/// Single-unit contract: one arm per round, one reward back.
class SingleUnitPolicy {
 public:
  virtual ~SingleUnitPolicy() = default;

  virtual Arm select(Round t) = 0;
  virtual void observe(Arm arm, double reward) = 0;

  // Hidden state for the current round. Only the state-aware oracle uses it;
  // the harness calls it before select().
  virtual void reveal_state(State) {}

  virtual bool last_was_probe() const { return false; }
  virtual std::optional<ProbeTrace> trace() const { return std::nullopt; }
};

/// Dual-unit contract: two simultaneous units share the hidden state.
class DualUnitPolicy {
 public:
  virtual ~DualUnitPolicy() = default;

  virtual ArmPair select(Round t) = 0;
  virtual void observe(ArmPair arms, double control_reward, double treatment_reward) = 0;

  // The action carried forward as lagged context (exploit arm, or the better
  // arm of a probe).
  virtual Arm recorded_arm() const = 0;

  virtual bool last_was_probe() const { return false; }
  virtual std::optional<ProbeTrace> trace() const { return std::nullopt; }
};

}  // namespace latent_bandit
