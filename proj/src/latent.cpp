#include "latent_bandit/latent.hpp"

#include <cmath>
#include <stdexcept>

#include "latent_bandit/baselines.hpp"

namespace latent_bandit {

namespace {

constexpr std::size_t kProbeArms = 2;

void require_selected(bool pending) {
  if (!pending) throw std::logic_error("observe() called without a preceding select()");
}

}  // namespace

ContextVector lagged_features(const LaggedContext& ctx, std::size_t num_arms) {
  if (ctx.prev_action >= num_arms) throw std::invalid_argument("previous action out of range");
  const auto k = static_cast<Eigen::Index>(num_arms);
  const auto a = static_cast<Eigen::Index>(ctx.prev_action);
  ContextVector x = ContextVector::Zero(2 * k + 2);
  x[0] = 1.0;
  x[1 + a] = 1.0;
  x[1 + k] = ctx.prev_reward;
  x[2 + k + a] = ctx.prev_reward;
  return x;
}

ContextVector combined_features(const Fingerprint& fp, const LaggedContext& ctx,
                                std::size_t num_arms) {
  const ContextVector lag = lagged_features(ctx, num_arms);
  ContextVector x(lag.size() + 2);
  x[0] = fp.r0;
  x[1] = fp.r1;
  x.tail(lag.size()) = lag;
  return x;
}

// -- Gates -------------------------------------------------------------------

void GateConfig::validate() const {
  if (!(z_thresh > 0.0)) throw std::invalid_argument("z_thresh must be > 0");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be > 0");
  if (!(m_thresh > 0.0)) throw std::invalid_argument("m_thresh must be > 0");
  if (!(lambda_h > 0.0)) throw std::invalid_argument("lambda_h must be > 0");
  if (!(delta_h > 0.0 && delta_h < 1.0)) throw std::invalid_argument("delta_h must lie in (0,1)");
  if (tau_min < 1) throw std::invalid_argument("tau_min must be >= 1");
}

GateDecision compute_gates(const GateConfig& cfg, const GateInputs& in) {
  GateDecision d;
  if (in.last) {
    d.z = (in.last->reward - in.last->predicted) /
          std::sqrt(in.last->variance + cfg.sigma0 * cfg.sigma0);
    d.residual = std::abs(d.z) >= cfg.z_thresh;
  }
  d.margin = std::abs(in.ucb0 - in.ucb1);
  d.uncertainty = d.margin <= cfg.m_thresh;
  const auto since = static_cast<double>(in.t - in.last_probe);
  d.hazard = 1.0 - std::exp(-cfg.lambda_h * since) >= cfg.delta_h;
  d.spacing_ok = in.t - in.last_probe >= cfg.tau_min;
  return d;
}

// -- LinUcbArms --------------------------------------------------------------

LinUcbArms::LinUcbArms(std::size_t num_arms, std::size_t dim, LinUcbParams params)
    : params_(params) {
  if (num_arms == 0) throw std::invalid_argument("need at least one arm");
  if (!(params.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  models_.reserve(num_arms);
  for (std::size_t a = 0; a < num_arms; ++a) models_.emplace_back(dim, params.reg);
}

std::size_t LinUcbArms::total_updates() const {
  std::size_t n = 0;
  for (const auto& m : models_) n += m.num_updates();
  return n;
}

void LinUcbArms::update(Arm a, const ContextVector& x, double reward) {
  if (a >= models_.size()) throw std::invalid_argument("arm index out of range");
  models_[a].update(x, reward);
}

std::vector<double> LinUcbArms::scores(const ContextVector& x) const {
  std::vector<double> s(models_.size());
  for (Arm a = 0; a < s.size(); ++a) s[a] = models_[a].ucb_score(x, params_.alpha);
  return s;
}

// -- LC-UCB ------------------------------------------------------------------

LcUcb::LcUcb(std::size_t num_arms, LinUcbParams params)
    : arms_(num_arms, lagged_dim(num_arms), params) {}

Arm LcUcb::select(Round) {
  phi_ = lagged_features(ctx_, arms_.num_arms());
  const Arm a = argmax_lowest(arms_.scores(phi_));
  pending_ = a;
  return a;
}

void LcUcb::observe(Arm arm, double reward) {
  require_selected(pending_.has_value());
  arms_.update(arm, phi_, reward);
  ctx_ = {arm, reward};
  pending_.reset();
}

// -- LC-TS -------------------------------------------------------------------

LcThompson::LcThompson(std::size_t num_arms, LinUcbParams params, double noise_scale,
                       std::uint64_t seed)
    : arms_(num_arms, lagged_dim(num_arms), params), noise_scale_(noise_scale), rng_(seed) {
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("noise_scale must be >= 0");
}

Arm LcThompson::select(Round) {
  phi_ = lagged_features(ctx_, arms_.num_arms());
  std::vector<double> draws(arms_.num_arms());
  for (Arm a = 0; a < draws.size(); ++a) {
    draws[a] = phi_.dot(arms_.model(a).sample_parameters(noise_scale_, rng_));
  }
  const Arm a = argmax_lowest(draws);
  pending_ = a;
  return a;
}

void LcThompson::observe(Arm arm, double reward) {
  require_selected(pending_.has_value());
  arms_.update(arm, phi_, reward);
  ctx_ = {arm, reward};
  pending_.reset();
}

// -- RP-UCB / AdaRP-UCB -------------------------------------------------------

RandomizedProbingUcb::RandomizedProbingUcb(LinUcbParams params, Round tau)
    : arms_(kProbeArms, combined_dim(kProbeArms), params), tau_(tau) {
  if (tau < 2) throw std::invalid_argument("RP-UCB probing interval must be >= 2");
}

RandomizedProbingUcb::RandomizedProbingUcb(LinUcbParams params, GateConfig gates)
    : arms_(kProbeArms, combined_dim(kProbeArms), params), gates_(gates) {
  gates.validate();
}

ArmPair RandomizedProbingUcb::select(Round t) {
  round_ = t;
  phi_ = combined_features(fp_, ctx_, kProbeArms);
  const auto scores = arms_.scores(phi_);
  for (Arm a = 0; a < kProbeArms; ++a) predictions_[a] = arms_.model(a).predict(phi_);

  trace_ = ProbeTrace{};
  trace_.margin = std::abs(scores[0] - scores[1]);
  if (gates_) {
    const GateDecision g = compute_gates(*gates_, {t, last_probe_, last_residual_, scores[0], scores[1]});
    probing_ = g.probe();
    trace_.gate_residual = g.residual;
    trace_.gate_uncertainty = g.uncertainty;
    trace_.gate_hazard = g.hazard;
    trace_.residual = g.z;
    if (probing_) last_probe_ = t;
  } else {
    probing_ = t % tau_ == 0;
  }
  trace_.probe = probing_;
  pending_ = true;
  if (probing_) return {0, 1};
  const Arm best = argmax_lowest(scores);
  return {best, best};
}

void RandomizedProbingUcb::observe(ArmPair arms, double control_reward, double treatment_reward) {
  require_selected(pending_);
  pending_ = false;
  arms_.update(arms.control, phi_, control_reward);
  arms_.update(arms.treatment, phi_, treatment_reward);
  if (probing_) {
    fp_ = {control_reward, treatment_reward, round_};
    if (!gates_) last_probe_ = round_;
    if (treatment_reward > control_reward) {
      ctx_ = {arms.treatment, treatment_reward};
    } else {
      ctx_ = {arms.control, control_reward};
    }
  } else {
    ctx_ = {arms.control, 0.5 * (control_reward + treatment_reward)};
  }
  const Prediction& p = predictions_[ctx_.prev_action];
  last_residual_ = ResidualInput{ctx_.prev_reward, p.mean, p.variance};
  trace_.fingerprint0 = fp_.r0;
  trace_.fingerprint1 = fp_.r1;
}

// -- SP-UCB / AdaSP-UCB -------------------------------------------------------

SequentialProbingUcb::SequentialProbingUcb(LinUcbParams params, Round tau)
    : arms_(kProbeArms, combined_dim(kProbeArms), params), tau_(tau) {
  if (tau < 3) throw std::invalid_argument("SP-UCB probing interval must be >= 3");
}

SequentialProbingUcb::SequentialProbingUcb(LinUcbParams params, GateConfig gates)
    : arms_(kProbeArms, combined_dim(kProbeArms), params), gates_(gates) {
  gates.validate();
}

Arm SequentialProbingUcb::select(Round t) {
  round_ = t;
  phi_ = combined_features(fp_, ctx_, kProbeArms);
  const auto scores = arms_.scores(phi_);
  for (Arm a = 0; a < kProbeArms; ++a) predictions_[a] = arms_.model(a).predict(phi_);

  trace_ = ProbeTrace{};
  trace_.margin = std::abs(scores[0] - scores[1]);
  pending_ = true;

  if (!gates_) {
    const Round phase = t % tau_;
    probing_ = phase == 0 || phase == 1;
    trace_.probe = probing_;
    return probing_ ? static_cast<Arm>(phase) : argmax_lowest(scores);
  }

  if (mode_ == Mode::kExploit) {
    const GateDecision g = compute_gates(*gates_, {t, last_probe_, last_residual_, scores[0], scores[1]});
    trace_.gate_residual = g.residual;
    trace_.gate_uncertainty = g.uncertainty;
    trace_.gate_hazard = g.hazard;
    trace_.residual = g.z;
    if (g.probe()) {
      mode_ = Mode::kProbe;
      probe_arm_ = 0;
    }
  }
  probing_ = mode_ == Mode::kProbe;
  trace_.probe = probing_;
  if (probing_) return probe_arm_++;
  return argmax_lowest(scores);
}

void SequentialProbingUcb::observe(Arm arm, double reward) {
  require_selected(pending_);
  pending_ = false;
  if (gates_) {
    if (mode_ == Mode::kProbe && probe_arm_ == 2) {
      mode_ = Mode::kExploit;
      fp_ = {ctx_.prev_reward, reward, round_};
      last_probe_ = round_;
    }
  } else if (probing_ && arm == 1 && round_ > 1) {
    fp_ = {ctx_.prev_reward, reward, round_};
    last_probe_ = round_;
  }
  arms_.update(arm, phi_, reward);
  const Prediction& p = predictions_[arm];
  last_residual_ = ResidualInput{reward, p.mean, p.variance};
  ctx_ = {arm, reward};
  trace_.fingerprint0 = fp_.r0;
  trace_.fingerprint1 = fp_.r1;
}

}  // namespace latent_bandit
