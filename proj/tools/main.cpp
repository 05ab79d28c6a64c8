#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "latent_bandit/harness.hpp"

namespace lb = latent_bandit;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int run_command(const std::string& config, const std::string& out, std::size_t workers,
                const std::string& preset) {
  lb::SweepConfig cfg = lb::load_config(config);
  lb::apply_preset(cfg, lb::parse_preset(preset));
  cfg.validate();
  workers = lb::workers_from_env(workers);
  const auto result = lb::run_sweep(cfg, workers);
  lb::emit_results(result, cfg, out);
  int status = kOk;
  for (const auto& cell : result.cells) {
    if (!cell.complete) {
      std::cerr << "cell " << cell.cell.index << " incomplete: " << cell.error << '\n';
      status = kRuntimeError;
    }
  }
  std::cout << lb::render_summary(std::filesystem::path(out) / "summary.csv");
  return status;
}

int theory_command(const std::string& config, const std::string& out) {
  std::ifstream in(config);
  if (!in) throw lb::ConfigError("cannot open config file " + config);
  lb::json j;
  try {
    in >> j;
  } catch (const lb::json::exception& e) {
    throw lb::ConfigError(config + ": " + e.what());
  }
  const auto cfg = lb::theory_config_from_json(j);
  const auto points = lb::run_theory_grid(cfg);
  std::filesystem::create_directories(out);
  const auto path = std::filesystem::path(out) / "theory.csv";
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << lb::theory_csv(points);
  std::cout << "wrote " << points.size() << " grid points to " << path.string() << '\n';
  return kOk;
}

int replay_command(const std::string& manifest, const std::string& episode) {
  const auto rec = lb::replay_episode(manifest, episode);
  std::cout << rec.to_json().dump() << '\n';
  return kOk;
}

int report_command(const std::string& dir) {
  std::cout << lb::render_summary(std::filesystem::path(dir) / "summary.csv");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-state bandit experiments"};
  app.require_subcommand(1);

  std::string config, out, preset, manifest, episode, in_dir;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "Run a regret sweep");
  run->add_option("--config", config, "Sweep config (JSON)")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--preset", preset, "desk or paper");

  auto* theory = app.add_subcommand("theory", "Probing-bound grid vs simulation");
  theory->add_option("--config", config, "Theory config (JSON)")->required();
  theory->add_option("--out", out, "Output directory")->required();

  auto* replay = app.add_subcommand("replay", "Re-run one episode from a manifest");
  replay->add_option("--manifest", manifest, "manifest.json")->required();
  replay->add_option("--episode", episode, "cell:instance:run:algorithm")->required();

  auto* report = app.add_subcommand("report", "Print the summary table");
  report->add_option("--in", in_dir, "Results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return run_command(config, out, workers, preset);
    if (*theory) return theory_command(config, out);
    if (*replay) return replay_command(manifest, episode);
    if (*report) return report_command(in_dir);
  } catch (const lb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
