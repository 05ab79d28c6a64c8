#include <algorithm>
#include <cmath>
#include <set>

#include "latent_bandit/baselines.hpp"
#include "latent_bandit/harness.hpp"
#include "latent_bandit/latent.hpp"

namespace latent_bandit {

namespace {

const std::map<std::string, std::set<std::string>>& allowed_params() {
  static const std::set<std::string> kLinUcb{"alpha", "reg"};
  static const std::set<std::string> kGates{"alpha",    "reg",     "z_thresh", "sigma0",
                                            "m_thresh", "lambda_h", "delta_h", "tau_min"};
  static const std::map<std::string, std::set<std::string>> kAllowed{
      {algo::kAdaRpUcb, kGates},
      {algo::kRpUcb, {"alpha", "reg", "tau"}},
      {algo::kAdaSpUcb, kGates},
      {algo::kDUcb, {"discount"}},
      {algo::kExp3, {"gamma"}},
      {algo::kExp3S, {"gamma", "alpha_s"}},
      {algo::kLcTs, {"alpha", "reg", "noise_scale"}},
      {algo::kLcUcb, kLinUcb},
      {algo::kSpUcb, {"alpha", "reg", "tau"}},
      {algo::kSwUcb, {"window"}},
      {algo::kTs, {"mu0", "kappa0", "a0", "b0"}},
      {algo::kUcb1, {}},
      {algo::kOptSingleArm, {}},
      {algo::kOracle, {}},
      {algo::kRandom, {}},
  };
  return kAllowed;
}

template <typename T>
T param(const json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter '") + key + "': " + e.what());
  }
}

LinUcbParams linucb_params(const json& p) {
  return {param(p, "alpha", 1.0), param(p, "reg", 1.0)};
}

GateConfig gate_params(const json& p, double sigma) {
  GateConfig g;
  g.z_thresh = param(p, "z_thresh", g.z_thresh);
  g.sigma0 = param(p, "sigma0", std::max(sigma, 0.05));
  g.m_thresh = param(p, "m_thresh", g.m_thresh);
  g.lambda_h = param(p, "lambda_h", g.lambda_h);
  g.delta_h = param(p, "delta_h", g.delta_h);
  g.tau_min = param(p, "tau_min", g.tau_min);
  return g;
}

AnyPolicy build(const AlgorithmSpec& spec, const PolicyContext& ctx) {
  const auto& id = spec.id;
  const auto& p = spec.params;
  const std::size_t k = ctx.rewards.num_arms();
  if (is_probing(id) && k != 2) {
    throw ConfigError(id + " requires exactly two arms");
  }
  if (id == algo::kAdaRpUcb) {
    return std::make_unique<RandomizedProbingUcb>(linucb_params(p), gate_params(p, ctx.sigma));
  }
  if (id == algo::kRpUcb) {
    return std::make_unique<RandomizedProbingUcb>(linucb_params(p), param<Round>(p, "tau", 10));
  }
  if (id == algo::kAdaSpUcb) {
    return std::make_unique<SequentialProbingUcb>(linucb_params(p), gate_params(p, ctx.sigma));
  }
  if (id == algo::kSpUcb) {
    return std::make_unique<SequentialProbingUcb>(linucb_params(p), param<Round>(p, "tau", 10));
  }
  if (id == algo::kLcUcb) return std::make_unique<LcUcb>(k, linucb_params(p));
  if (id == algo::kLcTs) {
    return std::make_unique<LcThompson>(k, linucb_params(p), param(p, "noise_scale", 1.0),
                                        ctx.seed);
  }
  if (id == algo::kUcb1) return std::make_unique<Ucb1>(k);
  if (id == algo::kTs) {
    NormalGammaPrior prior{param(p, "mu0", 0.5), param(p, "kappa0", 1.0), param(p, "a0", 1.0),
                           param(p, "b0", 0.01)};
    if (!(prior.kappa > 0.0 && prior.shape > 0.0 && prior.rate > 0.0)) {
      throw ConfigError("TS prior kappa0, a0, b0 must be > 0");
    }
    return std::make_unique<GaussianThompson>(k, prior, ctx.seed);
  }
  if (id == algo::kExp3) {
    return std::make_unique<Exp3>(k, param(p, "gamma", 0.1), 0.0, ctx.seed);
  }
  if (id == algo::kExp3S) {
    const double alpha_s = param(p, "alpha_s", 1.0 / static_cast<double>(ctx.horizon));
    return std::make_unique<Exp3>(k, param(p, "gamma", 0.1), alpha_s, ctx.seed);
  }
  if (id == algo::kSwUcb) {
    return std::make_unique<SlidingWindowUcb>(k, param<std::size_t>(p, "window", 200));
  }
  if (id == algo::kDUcb) return std::make_unique<DiscountedUcb>(k, param(p, "discount", 0.99));
  if (id == algo::kOptSingleArm) {
    const auto pi = stationary_distribution(ctx.transitions);
    return std::make_unique<FixedArm>(oracle_single_arm(ctx.rewards, pi));
  }
  if (id == algo::kOracle) return std::make_unique<StateAwareOracle>(ctx.rewards);
  if (id == algo::kRandom) return std::make_unique<UniformRandom>(k, ctx.seed);
  throw ConfigError("unknown algorithm '" + id + "'");
}

}  // namespace

std::vector<AlgorithmSpec> default_roster() {
  std::vector<AlgorithmSpec> roster;
  for (const char* id : {algo::kAdaRpUcb, algo::kRpUcb, algo::kAdaSpUcb, algo::kDUcb, algo::kExp3,
                         algo::kExp3S, algo::kLcTs, algo::kLcUcb, algo::kSpUcb, algo::kSwUcb,
                         algo::kTs, algo::kUcb1}) {
    roster.push_back({id, json::object()});
  }
  return roster;
}

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> kIds = [] {
    std::vector<std::string> ids;
    for (const auto& [id, keys] : allowed_params()) ids.push_back(id);
    return ids;
  }();
  return kIds;
}

bool is_dual_unit(const std::string& id) { return id == algo::kAdaRpUcb || id == algo::kRpUcb; }

bool is_probing(const std::string& id) {
  return id == algo::kAdaRpUcb || id == algo::kRpUcb || id == algo::kAdaSpUcb ||
         id == algo::kSpUcb;
}

AnyPolicy make_policy(const AlgorithmSpec& spec, const PolicyContext& ctx) {
  const auto it = allowed_params().find(spec.id);
  if (it == allowed_params().end()) throw ConfigError("unknown algorithm '" + spec.id + "'");
  if (!spec.params.is_object()) throw ConfigError(spec.id + ": params must be an object");
  for (const auto& [key, value] : spec.params.items()) {
    if (!it->second.contains(key)) {
      throw ConfigError(spec.id + ": unknown parameter '" + key + "'");
    }
  }
  try {
    return build(spec, ctx);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(spec.id + ": " + e.what());
  }
}

}  // namespace latent_bandit
