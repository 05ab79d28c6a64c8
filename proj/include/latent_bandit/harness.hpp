#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "latent_bandit/env.hpp"
#include "latent_bandit/policy.hpp"
#include "latent_bandit/theory.hpp"

namespace latent_bandit {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Algorithms

namespace algo {
inline constexpr const char* kAdaRpUcb = "AdaRP-UCB";
inline constexpr const char* kRpUcb = "RP-UCB";
inline constexpr const char* kAdaSpUcb = "AdaSP-UCB";
inline constexpr const char* kDUcb = "D-UCB";
inline constexpr const char* kExp3 = "EXP3";
inline constexpr const char* kExp3S = "EXP3-S";
inline constexpr const char* kLcTs = "LC-TS";
inline constexpr const char* kLcUcb = "LC-UCB";
inline constexpr const char* kSpUcb = "SP-UCB";
inline constexpr const char* kSwUcb = "SW-UCB";
inline constexpr const char* kTs = "TS";
inline constexpr const char* kUcb1 = "UCB1";
inline constexpr const char* kOptSingleArm = "OptSingleArm";
inline constexpr const char* kOracle = "Oracle";
inline constexpr const char* kRandom = "Random";
}  // namespace algo

struct AlgorithmSpec {
  std::string id;
  json params = json::object();
};

// The twelve learning algorithms of the comparison table, in column order.
std::vector<AlgorithmSpec> default_roster();
const std::vector<std::string>& known_algorithms();
bool is_dual_unit(const std::string& id);
bool is_probing(const std::string& id);

struct PolicyContext {
  const RewardMatrix& rewards;
  const TransitionMatrix& transitions;
  double sigma;
  Round horizon;
  std::uint64_t seed;
};

using AnyPolicy = std::variant<std::unique_ptr<SingleUnitPolicy>, std::unique_ptr<DualUnitPolicy>>;

/// Builds a policy from its id and parameter overrides. Unknown ids or
/// parameters, and out-of-range values, throw ConfigError.
AnyPolicy make_policy(const AlgorithmSpec& spec, const PolicyContext& ctx);

// ---------------------------------------------------------------------------
// Configuration

enum class DualRegret { kMean, kSum };

struct CellDefaults {
  std::size_t num_states = 10;
  double p_stay = 0.99;
  double sigma = 0.01;
  Round horizon = 20000;
};

struct SweepConfig {
  std::vector<std::size_t> state_counts{2, 10, 20, 50};
  std::vector<double> stay_probs{0.5, 0.8, 0.9, 0.95, 0.99};
  std::vector<double> noise_sds{0.01, 0.05, 0.1, 0.5};
  std::vector<Round> horizons{500, 1000, 5000, 20000};
  std::size_t num_instances = 128;
  std::size_t runs_per_instance = 5;
  std::vector<AlgorithmSpec> algorithms = default_roster();
  std::uint64_t root_seed = 20260101;
  std::size_t smoothing_window = 50;

  CellDefaults defaults;
  std::size_t num_arms = 2;
  DualRegret dual_regret = DualRegret::kMean;
  DualNoise dual_noise = DualNoise::kPerUnitDoubled;
  bool trace = false;

  void validate() const;
};

enum class Preset { kNone, kDesk, kPaper };

Preset parse_preset(const std::string& name);
void apply_preset(SweepConfig& cfg, Preset preset);

SweepConfig config_from_json(const json& j);
json config_to_json(const SweepConfig& cfg);
SweepConfig load_config(const std::filesystem::path& path);

// One row of the results table: the default cell, or the default with a
// single parameter changed.
struct Cell {
  std::size_t index = 0;
  std::string varying;  // "Default", "Number of States", ...
  std::string value;    // empty for the default row
  std::size_t num_states = 10;
  double p_stay = 0.99;
  double sigma = 0.01;
  Round horizon = 20000;
};

std::vector<Cell> expand_cells(const SweepConfig& cfg);

// Configured algorithms followed by the two oracle columns.
std::vector<AlgorithmSpec> resolved_algorithms(const SweepConfig& cfg);

// ---------------------------------------------------------------------------
// Seeding
//
// instance seed  = derive(derive(derive(root, "instance"), cell), instance)
// episode seed   = derive(derive(derive(derive(root, "episode"), cell), instance), run)
// policy seed    = derive(episode seed, algorithm id)
// The environment is seeded with the episode seed, so every algorithm sees the
// same hidden trajectory and noise for a given (cell, instance, run).

std::uint64_t instance_seed(std::uint64_t root, std::size_t cell, std::size_t instance);
std::uint64_t episode_seed(std::uint64_t root, std::size_t cell, std::size_t instance,
                           std::size_t run);
std::uint64_t policy_seed(std::uint64_t episode, const std::string& algorithm);

Instance make_instance(const SweepConfig& cfg, const Cell& cell, std::size_t instance);

struct EpisodeKey {
  std::size_t cell = 0;
  std::size_t instance = 0;
  std::size_t run = 0;
  std::string algorithm;

  std::string to_string() const;  // "cell:instance:run:algorithm"
  static EpisodeKey parse(const std::string& text);
};

// ---------------------------------------------------------------------------
// Episodes

struct ProbeEvent {
  Round t;
  ProbeTrace trace;
};

struct RunRecord {
  std::string algorithm;
  std::size_t cell = 0;
  std::size_t instance = 0;
  std::size_t run = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t episode_seed = 0;
  bool dual_unit = false;

  std::vector<std::uint32_t> states;
  std::vector<std::uint32_t> optimal_arms;
  std::vector<std::uint32_t> actions;  // a_t; the lagged-context arm for dual units
  std::vector<double> rewards;         // r_t
  std::vector<double> regret;
  std::vector<std::uint8_t> probe;
  // Dual-unit only: what each unit actually played and observed.
  std::vector<std::uint32_t> control_actions;
  std::vector<std::uint32_t> treatment_actions;
  std::vector<double> control_rewards;
  std::vector<double> treatment_rewards;

  std::vector<ProbeEvent> probe_events;

  double cumulative_regret() const;
  std::size_t probe_rounds() const;
  json to_json() const;
};

struct EpisodeOptions {
  DualRegret dual_regret = DualRegret::kMean;
  DualNoise dual_noise = DualNoise::kPerUnitDoubled;
  bool probe_events = false;
};

/// Runs one algorithm on one instance for `horizon` rounds. Deterministic in
/// (spec, instance, horizon, seed, options).
RunRecord run_episode(const AlgorithmSpec& spec, const Instance& instance, Round horizon,
                      std::uint64_t seed, const EpisodeOptions& options = {});

// ---------------------------------------------------------------------------
// Sweeps and metrics

struct AlgorithmSummary {
  std::string algorithm;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double win_rate = 0.0;
  double probe_fraction = 0.0;
  std::vector<double> instance_regret;    // mean over runs, per instance
  std::vector<double> optimal_frequency;  // unsmoothed, per round
};

struct CellSummary {
  Cell cell;
  bool complete = true;
  std::string error;
  std::vector<AlgorithmSummary> algorithms;

  const AlgorithmSummary& at(const std::string& algorithm) const;
};

struct SweepResult {
  std::vector<CellSummary> cells;
  std::vector<RunRecord> records;  // only with cfg.trace
};

std::size_t workers_from_env(std::size_t fallback);

/// Executes every (cell, instance, run, algorithm) exactly once. Results do
/// not depend on the number of workers.
SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers = 1);

/// Per-instance winner gets credit 1; ties split it evenly. `regret` is
/// indexed [algorithm][instance].
std::vector<double> winning_rates(const std::vector<std::vector<double>>& regret);

/// Trailing moving average over the last `window` entries (fewer at the start).
std::vector<double> trailing_average(std::span<const double> series, std::size_t window);

/// Fraction of episodes playing the state's optimal arm at each round, per
/// algorithm, then smoothed.
std::map<std::string, std::vector<double>> optimal_arm_frequency(std::span<const RunRecord> records,
                                                                 std::size_t window);

struct PairedDifference {
  double mean;    // mean over instances of regret(a) - regret(b)
  double stderr;
};

PairedDifference paired_difference(const CellSummary& cell, const std::string& a,
                                   const std::string& b);

// ---------------------------------------------------------------------------
// Output

extern const char* const kCodeVersion;

void emit_results(const SweepResult& result, const SweepConfig& cfg,
                  const std::filesystem::path& out_dir);

std::string summary_csv(const SweepResult& result, const SweepConfig& cfg);

// Table-shaped text rendering of a summary.csv.
std::string render_summary(const std::filesystem::path& summary_csv_path);

// ---------------------------------------------------------------------------
// Probing-bound grid

struct TheoryConfig {
  std::vector<std::vector<double>> rewards{{0.9, 0.1}, {0.2, 0.8}};
  std::vector<Round> taus;  // defaults to 2..50
  std::vector<double> qs{0.01, 0.05};
  std::vector<double> eps_fps{0.0, 0.1};
  std::size_t num_seeds = 64;
  Round horizon = 20000;
  double delta_probe = 0.5;
  std::uint64_t root_seed = 20260101;

  TheoryConfig();
};

TheoryConfig theory_config_from_json(const json& j);
std::vector<ProbingGridPoint> run_theory_grid(const TheoryConfig& cfg);
std::string theory_csv(std::span<const ProbingGridPoint> points);

/// Re-runs a single episode described by a manifest.
RunRecord replay_episode(const std::filesystem::path& manifest, const std::string& episode_id);

}  // namespace latent_bandit
