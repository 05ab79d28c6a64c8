#include "latent_bandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace latent_bandit {

// -- Configuration -----------------------------------------------------------

namespace {

template <typename T>
void read_list(const json& j, const char* key, std::vector<T>& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_value(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void SweepConfig::validate() const {
  if (state_counts.empty() || stay_probs.empty() || noise_sds.empty() || horizons.empty()) {
    throw ConfigError("sweep lists must be nonempty");
  }
  if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
  if (num_instances < 1 || runs_per_instance < 1) {
    throw ConfigError("num_instances and runs_per_instance must be >= 1");
  }
  if (smoothing_window < 1) throw ConfigError("smoothing_window must be >= 1");
  if (num_arms < 1) throw ConfigError("num_arms must be >= 1");
  for (auto s : state_counts) {
    if (s < 1) throw ConfigError("state counts must be >= 1");
  }
  for (double p : stay_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("stay probabilities must lie in [0,1]");
  }
  for (double s : noise_sds) {
    if (!(s >= 0.0)) throw ConfigError("noise standard deviations must be >= 0");
  }
  for (auto t : horizons) {
    if (t < 1) throw ConfigError("horizons must be >= 1");
  }
  if (defaults.num_states < 1 || defaults.horizon < 1 || !(defaults.sigma >= 0.0) ||
      !(defaults.p_stay >= 0.0 && defaults.p_stay <= 1.0)) {
    throw ConfigError("invalid default cell");
  }
  // Dry-build every policy so bad ids, parameters and arm counts fail before
  // any rounds run.
  const RewardMatrix dummy(1, num_arms, std::vector<double>(num_arms, 0.5));
  const TransitionMatrix chain = make_transition_matrix(1, 1.0);
  std::vector<std::string> seen;
  for (const auto& spec : algorithms) {
    if (std::find(seen.begin(), seen.end(), spec.id) != seen.end()) {
      throw ConfigError("duplicate algorithm '" + spec.id + "'");
    }
    seen.push_back(spec.id);
    make_policy(spec, {dummy, chain, defaults.sigma, defaults.horizon, 0});
  }
}

Preset parse_preset(const std::string& name) {
  if (name.empty() || name == "none") return Preset::kNone;
  if (name == "desk") return Preset::kDesk;
  if (name == "paper") return Preset::kPaper;
  throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

void apply_preset(SweepConfig& cfg, Preset preset) {
  switch (preset) {
    case Preset::kNone:
      break;
    case Preset::kDesk:
      cfg.num_instances = 32;
      cfg.runs_per_instance = 3;
      cfg.defaults.horizon = 5000;
      break;
    case Preset::kPaper:
      cfg.num_instances = 128;
      cfg.runs_per_instance = 5;
      cfg.defaults.horizon = 20000;
      break;
  }
}

SweepConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> kFields{
      "state_counts", "stay_probs", "noise_sds", "horizons",    "num_instances",
      "runs_per_instance", "algorithms", "root_seed", "smoothing_window", "defaults",
      "num_arms", "dual_regret", "dual_noise", "trace"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  SweepConfig cfg;
  read_list(j, "state_counts", cfg.state_counts);
  read_list(j, "stay_probs", cfg.stay_probs);
  read_list(j, "noise_sds", cfg.noise_sds);
  read_list(j, "horizons", cfg.horizons);
  read_value(j, "num_instances", cfg.num_instances);
  read_value(j, "runs_per_instance", cfg.runs_per_instance);
  read_value(j, "root_seed", cfg.root_seed);
  read_value(j, "smoothing_window", cfg.smoothing_window);
  read_value(j, "num_arms", cfg.num_arms);
  read_value(j, "trace", cfg.trace);
  if (j.contains("algorithms")) {
    const auto& list = j.at("algorithms");
    if (!list.is_array()) throw ConfigError("field 'algorithms' must be an array");
    cfg.algorithms.clear();
    for (const auto& entry : list) {
      if (entry.is_string()) {
        cfg.algorithms.push_back({entry.get<std::string>(), json::object()});
      } else if (entry.is_object() && entry.contains("id") && entry.at("id").is_string()) {
        cfg.algorithms.push_back(
            {entry.at("id").get<std::string>(), entry.contains("params") ? entry.at("params") : json::object()});
      } else {
        throw ConfigError("algorithm entries must be strings or {id, params} objects");
      }
    }
  }
  if (j.contains("defaults")) {
    const auto& d = j.at("defaults");
    if (!d.is_object()) throw ConfigError("field 'defaults' must be an object");
    for (const auto& [key, value] : d.items()) {
      if (key != "S" && key != "p_stay" && key != "sigma" && key != "T") {
        throw ConfigError("unknown defaults field '" + key + "'");
      }
    }
    read_value(d, "S", cfg.defaults.num_states);
    read_value(d, "p_stay", cfg.defaults.p_stay);
    read_value(d, "sigma", cfg.defaults.sigma);
    read_value(d, "T", cfg.defaults.horizon);
  }
  if (j.contains("dual_regret")) {
    std::string mode;
    read_value(j, "dual_regret", mode);
    if (mode == "mean") {
      cfg.dual_regret = DualRegret::kMean;
    } else if (mode == "sum") {
      cfg.dual_regret = DualRegret::kSum;
    } else {
      throw ConfigError("dual_regret must be 'mean' or 'sum'");
    }
  }
  if (j.contains("dual_noise")) {
    std::string mode;
    read_value(j, "dual_noise", mode);
    if (mode == "per_unit") {
      cfg.dual_noise = DualNoise::kPerUnitDoubled;
    } else if (mode == "split_total") {
      cfg.dual_noise = DualNoise::kSplitTotal;
    } else {
      throw ConfigError("dual_noise must be 'per_unit' or 'split_total'");
    }
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const SweepConfig& cfg) {
  json algos = json::array();
  for (const auto& a : cfg.algorithms) algos.push_back({{"id", a.id}, {"params", a.params}});
  return {
      {"state_counts", cfg.state_counts},
      {"stay_probs", cfg.stay_probs},
      {"noise_sds", cfg.noise_sds},
      {"horizons", cfg.horizons},
      {"num_instances", cfg.num_instances},
      {"runs_per_instance", cfg.runs_per_instance},
      {"algorithms", algos},
      {"root_seed", cfg.root_seed},
      {"smoothing_window", cfg.smoothing_window},
      {"defaults",
       {{"S", cfg.defaults.num_states},
        {"p_stay", cfg.defaults.p_stay},
        {"sigma", cfg.defaults.sigma},
        {"T", cfg.defaults.horizon}}},
      {"num_arms", cfg.num_arms},
      {"dual_regret", cfg.dual_regret == DualRegret::kMean ? "mean" : "sum"},
      {"dual_noise", cfg.dual_noise == DualNoise::kPerUnitDoubled ? "per_unit" : "split_total"},
      {"trace", cfg.trace},
  };
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<Cell> expand_cells(const SweepConfig& cfg) {
  std::vector<Cell> cells;
  Cell base;
  base.varying = "Default";
  base.num_states = cfg.defaults.num_states;
  base.p_stay = cfg.defaults.p_stay;
  base.sigma = cfg.defaults.sigma;
  base.horizon = cfg.defaults.horizon;
  cells.push_back(base);

  const auto add = [&](const char* varying, const std::string& value, auto mutate) {
    Cell c = base;
    c.varying = varying;
    c.value = value;
    mutate(c);
    c.index = cells.size();
    cells.push_back(c);
  };
  for (auto s : cfg.state_counts) {
    if (s != base.num_states) {
      add("Number of States", std::to_string(s), [&](Cell& c) { c.num_states = s; });
    }
  }
  for (double p : cfg.stay_probs) {
    if (p != base.p_stay) add("Self-transition Prob.", format_number(p), [&](Cell& c) { c.p_stay = p; });
  }
  for (double s : cfg.noise_sds) {
    if (s != base.sigma) add("Reward Noise SD.", format_number(s), [&](Cell& c) { c.sigma = s; });
  }
  for (auto t : cfg.horizons) {
    if (t != base.horizon) add("Number of Rounds", std::to_string(t), [&](Cell& c) { c.horizon = t; });
  }
  return cells;
}

std::vector<AlgorithmSpec> resolved_algorithms(const SweepConfig& cfg) {
  auto out = cfg.algorithms;
  for (const char* id : {algo::kOptSingleArm, algo::kOracle}) {
    const bool present =
        std::any_of(out.begin(), out.end(), [&](const AlgorithmSpec& a) { return a.id == id; });
    if (!present) out.push_back({id, json::object()});
  }
  return out;
}

// -- Seeding -----------------------------------------------------------------

std::uint64_t instance_seed(std::uint64_t root, std::size_t cell, std::size_t instance) {
  return derive_seed(derive_seed(derive_seed(root, "instance"), cell), instance);
}

std::uint64_t episode_seed(std::uint64_t root, std::size_t cell, std::size_t instance,
                           std::size_t run) {
  return derive_seed(derive_seed(derive_seed(derive_seed(root, "episode"), cell), instance), run);
}

std::uint64_t policy_seed(std::uint64_t episode, const std::string& algorithm) {
  return derive_seed(episode, algorithm);
}

Instance make_instance(const SweepConfig& cfg, const Cell& cell, std::size_t instance) {
  const auto seed = instance_seed(cfg.root_seed, cell.index, instance);
  return {sample_instance(cell.num_states, cfg.num_arms, seed), cell.p_stay, cell.sigma, seed};
}

std::string EpisodeKey::to_string() const {
  return std::to_string(cell) + ":" + std::to_string(instance) + ":" + std::to_string(run) + ":" +
         algorithm;
}

EpisodeKey EpisodeKey::parse(const std::string& text) {
  EpisodeKey key;
  std::size_t pos = 0;
  std::size_t* fields[] = {&key.cell, &key.instance, &key.run};
  for (auto* field : fields) {
    const auto colon = text.find(':', pos);
    if (colon == std::string::npos) {
      throw ConfigError("episode id must look like cell:instance:run:algorithm");
    }
    try {
      std::size_t used = 0;
      const std::string part = text.substr(pos, colon - pos);
      *field = std::stoul(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("bad episode id '" + text + "'");
    }
    pos = colon + 1;
  }
  key.algorithm = text.substr(pos);
  if (key.algorithm.empty()) throw ConfigError("episode id is missing the algorithm");
  return key;
}

// -- Episodes ----------------------------------------------------------------

double RunRecord::cumulative_regret() const {
  double total = 0.0;
  for (double r : regret) total += r;
  return total;
}

std::size_t RunRecord::probe_rounds() const {
  return static_cast<std::size_t>(std::count(probe.begin(), probe.end(), std::uint8_t{1}));
}

json RunRecord::to_json() const {
  json j{{"algorithm", algorithm},
         {"episode", EpisodeKey{cell, instance, run, algorithm}.to_string()},
         {"cell", cell},
         {"instance", instance},
         {"run", run},
         {"instance_seed", instance_seed},
         {"episode_seed", episode_seed},
         {"dual_unit", dual_unit},
         {"state", states},
         {"optimal_arm", optimal_arms},
         {"action", actions},
         {"reward", rewards},
         {"regret", regret},
         {"probe", probe},
         {"cumulative_regret", cumulative_regret()}};
  if (dual_unit) {
    j["control_action"] = control_actions;
    j["treatment_action"] = treatment_actions;
    j["control_reward"] = control_rewards;
    j["treatment_reward"] = treatment_rewards;
  }
  return j;
}

RunRecord run_episode(const AlgorithmSpec& spec, const Instance& instance, Round horizon,
                      std::uint64_t seed, const EpisodeOptions& options) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  const auto transitions = make_transition_matrix(instance.rewards.num_states(), instance.p_stay);
  AnyPolicy policy = make_policy(
      spec, {instance.rewards, transitions, instance.sigma, horizon, policy_seed(seed, spec.id)});
  Environment env(instance.rewards, transitions, instance.sigma, seed, options.dual_noise);

  RunRecord rec;
  rec.algorithm = spec.id;
  rec.instance_seed = instance.seed;
  rec.episode_seed = seed;
  const auto n = static_cast<std::size_t>(horizon);
  rec.states.reserve(n);
  rec.optimal_arms.reserve(n);
  rec.actions.reserve(n);
  rec.rewards.reserve(n);
  rec.regret.reserve(n);
  rec.probe.reserve(n);

  const auto log_probe = [&](Round t, const std::optional<ProbeTrace>& trace) {
    if (options.probe_events && trace && trace->probe) rec.probe_events.push_back({t, *trace});
  };

  if (auto* single = std::get_if<std::unique_ptr<SingleUnitPolicy>>(&policy)) {
    auto& p = **single;
    for (Round t = 1; t <= horizon; ++t) {
      p.reveal_state(env.current_state());
      const Arm a = p.select(t);
      const SingleStep step = env.step_single(a);
      p.observe(a, step.reward);
      rec.states.push_back(static_cast<std::uint32_t>(step.true_state));
      rec.optimal_arms.push_back(static_cast<std::uint32_t>(step.optimal_arm));
      rec.actions.push_back(static_cast<std::uint32_t>(a));
      rec.rewards.push_back(step.reward);
      rec.regret.push_back(step.gap);
      rec.probe.push_back(p.last_was_probe() ? 1 : 0);
      log_probe(t, p.trace());
    }
    return rec;
  }

  auto& p = *std::get<std::unique_ptr<DualUnitPolicy>>(policy);
  rec.dual_unit = true;
  const double regret_scale = options.dual_regret == DualRegret::kMean ? 0.5 : 1.0;
  for (Round t = 1; t <= horizon; ++t) {
    const ArmPair arms = p.select(t);
    const DualStep step = env.step_dual(arms.control, arms.treatment);
    p.observe(arms, step.control_reward, step.treatment_reward);
    const Arm recorded = p.recorded_arm();
    rec.states.push_back(static_cast<std::uint32_t>(step.true_state));
    rec.optimal_arms.push_back(static_cast<std::uint32_t>(step.optimal_arm));
    rec.actions.push_back(static_cast<std::uint32_t>(recorded));
    rec.rewards.push_back(recorded == arms.treatment && arms.treatment != arms.control
                              ? step.treatment_reward
                              : (p.last_was_probe()
                                     ? step.control_reward
                                     : 0.5 * (step.control_reward + step.treatment_reward)));
    rec.regret.push_back(regret_scale * (step.control_gap + step.treatment_gap));
    rec.probe.push_back(p.last_was_probe() ? 1 : 0);
    rec.control_actions.push_back(static_cast<std::uint32_t>(arms.control));
    rec.treatment_actions.push_back(static_cast<std::uint32_t>(arms.treatment));
    rec.control_rewards.push_back(step.control_reward);
    rec.treatment_rewards.push_back(step.treatment_reward);
    log_probe(t, p.trace());
  }
  return rec;
}

// -- Sweep -------------------------------------------------------------------

std::size_t workers_from_env(std::size_t fallback) {
  if (const char* v = std::getenv("LATENT_BANDIT_WORKERS")) {
    try {
      const long n = std::stol(v);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("LATENT_BANDIT_WORKERS must be a positive integer, got '") + v +
                      "'");
  }
  return fallback;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  const auto body = [&](std::size_t worker) {
    for (std::size_t i = next++; i < count; i = next++) fn(i, worker);
  };
  if (workers == 1) {
    body(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stderr_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

struct EpisodeOutcome {
  double regret = 0.0;
  std::size_t probe_rounds = 0;
  bool ok = false;
  std::string error;
};

}  // namespace

const AlgorithmSummary& CellSummary::at(const std::string& algorithm) const {
  for (const auto& a : algorithms) {
    if (a.algorithm == algorithm) return a;
  }
  throw std::out_of_range("algorithm '" + algorithm + "' not in cell summary");
}

SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers) {
  cfg.validate();
  const auto cells = expand_cells(cfg);
  const auto algorithms = resolved_algorithms(cfg);
  const std::size_t num_algos = algorithms.size();
  const std::size_t runs = cfg.runs_per_instance;
  const std::size_t instances = cfg.num_instances;
  const EpisodeOptions options{cfg.dual_regret, cfg.dual_noise, cfg.trace};

  SweepResult result;
  for (const Cell& cell : cells) {
    CellSummary summary;
    summary.cell = cell;
    std::vector<Instance> pool;
    pool.reserve(instances);
    try {
      for (std::size_t i = 0; i < instances; ++i) pool.push_back(make_instance(cfg, cell, i));
    } catch (const std::exception& e) {
      summary.complete = false;
      summary.error = e.what();
      result.cells.push_back(std::move(summary));
      continue;
    }

    const std::size_t tasks = instances * runs * num_algos;
    const auto horizon = static_cast<std::size_t>(cell.horizon);
    std::vector<EpisodeOutcome> outcomes(tasks);
    std::vector<RunRecord> records(cfg.trace ? tasks : 0);
    const std::size_t lanes = std::max<std::size_t>(1, std::min(workers, tasks));
    // Per-worker integer tallies of optimal pulls; integer sums merge exactly.
    std::vector<std::vector<std::vector<std::uint32_t>>> optimal_counts(
        lanes, std::vector<std::vector<std::uint32_t>>(num_algos,
                                                       std::vector<std::uint32_t>(horizon, 0)));

    parallel_for(tasks, lanes, [&](std::size_t task, std::size_t worker) {
      const std::size_t algo_index = task % num_algos;
      const std::size_t run = (task / num_algos) % runs;
      const std::size_t inst = task / (num_algos * runs);
      auto& out = outcomes[task];
      try {
        RunRecord rec = run_episode(algorithms[algo_index], pool[inst], cell.horizon,
                                    episode_seed(cfg.root_seed, cell.index, inst, run), options);
        rec.cell = cell.index;
        rec.instance = inst;
        rec.run = run;
        out.regret = rec.cumulative_regret();
        out.probe_rounds = rec.probe_rounds();
        auto& counts = optimal_counts[worker][algo_index];
        for (std::size_t t = 0; t < horizon; ++t) {
          counts[t] += rec.actions[t] == rec.optimal_arms[t] ? 1u : 0u;
        }
        out.ok = true;
        if (cfg.trace) records[task] = std::move(rec);
      } catch (const std::exception& e) {
        out.error = algorithms[algo_index].id + ": " + e.what();
      }
    });

    for (const auto& o : outcomes) {
      if (!o.ok) {
        summary.complete = false;
        summary.error = o.error;
        break;
      }
    }

    std::vector<std::vector<double>> instance_regret(num_algos, std::vector<double>(instances));
    for (std::size_t a = 0; a < num_algos; ++a) {
      AlgorithmSummary s;
      s.algorithm = algorithms[a].id;
      std::size_t probes = 0;
      for (std::size_t i = 0; i < instances; ++i) {
        double sum = 0.0;
        for (std::size_t r = 0; r < runs; ++r) {
          const auto& o = outcomes[(i * runs + r) * num_algos + a];
          sum += o.regret;
          probes += o.probe_rounds;
        }
        instance_regret[a][i] = sum / static_cast<double>(runs);
      }
      s.instance_regret = instance_regret[a];
      s.mean_regret = mean_of(s.instance_regret);
      s.stderr_regret = stderr_of(s.instance_regret);
      const double episodes = static_cast<double>(instances * runs);
      s.probe_fraction = static_cast<double>(probes) / (episodes * static_cast<double>(horizon));
      s.optimal_frequency.assign(horizon, 0.0);
      for (std::size_t t = 0; t < horizon; ++t) {
        std::uint64_t total = 0;
        for (std::size_t w = 0; w < lanes; ++w) total += optimal_counts[w][a][t];
        s.optimal_frequency[t] = static_cast<double>(total) / episodes;
      }
      summary.algorithms.push_back(std::move(s));
    }

    // The state-aware oracle is the regret reference, not a contender.
    std::vector<std::size_t> contenders;
    std::vector<std::vector<double>> contender_regret;
    for (std::size_t a = 0; a < num_algos; ++a) {
      if (algorithms[a].id == algo::kOracle) continue;
      contenders.push_back(a);
      contender_regret.push_back(instance_regret[a]);
    }
    if (!contenders.empty()) {
      const auto rates = winning_rates(contender_regret);
      for (std::size_t c = 0; c < contenders.size(); ++c) {
        summary.algorithms[contenders[c]].win_rate = rates[c];
      }
    }

    result.cells.push_back(std::move(summary));
    if (cfg.trace) {
      for (std::size_t task = 0; task < tasks; ++task) {
        if (outcomes[task].ok) result.records.push_back(std::move(records[task]));
      }
    }
  }
  return result;
}

std::vector<double> winning_rates(const std::vector<std::vector<double>>& regret) {
  if (regret.empty()) return {};
  const std::size_t n = regret.front().size();
  for (const auto& r : regret) {
    if (r.size() != n) throw std::invalid_argument("incomplete cell: missing algorithm/instance pair");
  }
  std::vector<double> credit(regret.size(), 0.0);
  if (n == 0) return credit;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : regret) best = std::min(best, r[i]);
    std::size_t tied = 0;
    for (const auto& r : regret) tied += r[i] == best ? 1 : 0;
    for (std::size_t a = 0; a < regret.size(); ++a) {
      if (regret[a][i] == best) credit[a] += 1.0 / static_cast<double>(tied);
    }
  }
  for (double& c : credit) c /= static_cast<double>(n);
  return credit;
}

std::vector<double> trailing_average(std::span<const double> series, std::size_t window) {
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  std::vector<double> out(series.size());
  double running = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    running += series[t];
    if (t >= window) running -= series[t - window];
    out[t] = running / static_cast<double>(std::min(t + 1, window));
  }
  return out;
}

std::map<std::string, std::vector<double>> optimal_arm_frequency(std::span<const RunRecord> records,
                                                                 std::size_t window) {
  std::map<std::string, std::vector<double>> sums;
  std::map<std::string, std::size_t> episodes;
  for (const auto& rec : records) {
    auto& s = sums[rec.algorithm];
    if (s.size() < rec.actions.size()) s.resize(rec.actions.size(), 0.0);
    for (std::size_t t = 0; t < rec.actions.size(); ++t) {
      s[t] += rec.actions[t] == rec.optimal_arms[t] ? 1.0 : 0.0;
    }
    ++episodes[rec.algorithm];
  }
  std::map<std::string, std::vector<double>> out;
  for (auto& [name, s] : sums) {
    for (double& x : s) x /= static_cast<double>(episodes[name]);
    out[name] = trailing_average(s, window);
  }
  return out;
}

PairedDifference paired_difference(const CellSummary& cell, const std::string& a,
                                   const std::string& b) {
  const auto& ra = cell.at(a).instance_regret;
  const auto& rb = cell.at(b).instance_regret;
  std::vector<double> diff(ra.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ra[i] - rb[i];
  return {mean_of(diff), stderr_of(diff)};
}

}  // namespace latent_bandit
