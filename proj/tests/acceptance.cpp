#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "latent_bandit/harness.hpp"
#include "latent_bandit/latent.hpp"
#include "latent_bandit/linmodel.hpp"
#include "support.hpp"

using namespace latent_bandit;
namespace fs = std::filesystem;

namespace {

struct Report {
  std::vector<std::string> failures;

  // Prints one line per criterion.
  void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(), secs,
                detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    if (!ok) failures.push_back(name);
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// a < b with the paired margin exceeding two standard errors.
bool beats(const CellSummary& cell, const std::string& a, const std::string& b, std::string& detail) {
  const auto d = paired_difference(cell, a, b);
  const bool ok = -d.mean > 2.0 * d.stderr;
  if (!ok) {
    detail += a + " vs " + b + fmt(" diff %.2f se %.2f; ", d.mean, d.stderr);
  }
  return ok;
}

const CellSummary& find_cell(const SweepResult& res, const std::string& varying, const std::string& value) {
  for (const auto& c : res.cells) {
    if (c.cell.varying == varying && c.cell.value == value) return c;
  }
  throw std::runtime_error("missing cell " + varying + " " + value);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool oracle_equivalence(std::string& detail) {
  Rng rng(1);
  double worst = 0.0;
  for (int seq = 0; seq < 1000; ++seq) {
    const int d = 1 + static_cast<int>(rng.uniform_index(8));
    const double reg = 0.5 + rng.uniform();
    ArmLinearModel model(static_cast<std::size_t>(d), reg);
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> rs;
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd x(d);
      for (int j = 0; j < d; ++j) x[j] = 2.0 * rng.uniform() - 1.0;
      xs.push_back(x);
      rs.push_back(rng.normal());
      model.update(x, rs.back());
    }
    const auto oracle = test_support::batch_ridge(xs, rs, reg, d);
    worst = std::max(worst, (model.theta() - oracle).cwiseAbs().maxCoeff());
  }
  detail = fmt("max |theta - batch| = %.2e", worst);
  return worst <= 1e-8;
}

bool disambiguation(std::string& detail) {
  const auto m = test_support::ambiguity_matrix();
  std::set<std::pair<double, double>> fps;
  for (State s = 0; s < 4; ++s) {
    Environment env(m, make_transition_matrix(4, 1.0), 0.0, 1);
    env.set_state(s);
    const auto out = env.step_dual(0, 1);
    fps.insert({out.control_reward, out.treatment_reward});
  }
  const bool distinct = fps.size() == 4;
  const bool collide = m.mean(0, 0) == m.mean(1, 0);

  double lc = 0, sp = 0, ada = 0;
  const int seeds = 20;
  for (int i = 0; i < seeds; ++i) {
    const Instance inst{m, 0.99, 0.0, static_cast<std::uint64_t>(i)};
    const auto seed = derive_seed(7, static_cast<std::uint64_t>(i));
    lc += run_episode({algo::kLcUcb}, inst, 5000, seed).cumulative_regret();
    sp += run_episode({algo::kSpUcb}, inst, 5000, seed).cumulative_regret();
    ada += run_episode({algo::kAdaSpUcb}, inst, 5000, seed).cumulative_regret();
  }
  lc /= seeds;
  sp /= seeds;
  ada /= seeds;
  detail = fmt("LC-UCB %.1f, SP-UCB %.1f, AdaSP-UCB %.1f", lc, sp, ada);
  if (!distinct) detail += "; fingerprints collide";
  if (!collide) detail += "; arm-0 rewards differ";
  return distinct && collide && sp < lc && ada < lc;
}

bool table_orderings(const SweepResult& res, std::string& detail) {
  const auto& cell = find_cell(res, "Default", "");
  bool ok = cell.complete;
  ok &= beats(cell, algo::kAdaRpUcb, algo::kRpUcb, detail);
  ok &= beats(cell, algo::kAdaSpUcb, algo::kSpUcb, detail);
  for (const char* a : {algo::kLcUcb, algo::kLcTs, algo::kSpUcb, algo::kAdaSpUcb}) {
    for (const char* b : {algo::kUcb1, algo::kTs, algo::kExp3, algo::kExp3S}) ok &= beats(cell, a, b, detail);
  }
  const double oracle = cell.at(algo::kOracle).mean_regret;
  ok &= oracle == 0.0;
  detail += fmt("AdaRP %.1f RP %.1f AdaSP %.1f", cell.at(algo::kAdaRpUcb).mean_regret,
                cell.at(algo::kRpUcb).mean_regret, cell.at(algo::kAdaSpUcb).mean_regret);
  detail += fmt(" SP %.1f LC-UCB %.1f UCB1 %.1f", cell.at(algo::kSpUcb).mean_regret,
                cell.at(algo::kLcUcb).mean_regret, cell.at(algo::kUcb1).mean_regret);
  detail += fmt(" Oracle %.1f", oracle);
  return ok;
}

bool regime_flips(const SweepResult& res, std::string& detail) {
  const auto& two = find_cell(res, "Number of States", "2");
  const auto& noisy = find_cell(res, "Reward Noise SD.", "0.5");
  bool ok = two.complete && noisy.complete;
  for (const char* b : {algo::kAdaSpUcb, algo::kSpUcb}) ok &= beats(two, algo::kLcUcb, b, detail);
  for (const char* a : {algo::kDUcb, algo::kSwUcb}) {
    for (const char* b : {algo::kAdaSpUcb, algo::kSpUcb}) ok &= beats(noisy, a, b, detail);
  }
  detail += fmt("S=2: LC-UCB %.1f AdaSP %.1f SP %.1f;", two.at(algo::kLcUcb).mean_regret,
                two.at(algo::kAdaSpUcb).mean_regret, two.at(algo::kSpUcb).mean_regret);
  detail += fmt(" sigma=0.5: D-UCB %.1f SW-UCB %.1f AdaSP %.1f", noisy.at(algo::kDUcb).mean_regret,
                noisy.at(algo::kSwUcb).mean_regret, noisy.at(algo::kAdaSpUcb).mean_regret);
  detail += fmt(" SP %.1f", noisy.at(algo::kSpUcb).mean_regret);
  return ok;
}

bool theorem_validation(std::string& detail) {
  const TheoryConfig cfg;
  const auto points = run_theory_grid(cfg);
  const auto rewards = RewardMatrix::from_rows(cfg.rewards);
  bool ok = points.size() == cfg.taus.size() * cfg.qs.size() * cfg.eps_fps.size();
  double worst = -1e9;
  for (const auto& p : points) {
    const double slack = p.measured - (p.bound + 3.0 * p.stderr_measured);
    worst = std::max(worst, slack);
    ok &= slack <= 0.0;
  }
  detail = fmt("worst measured - (bound + 3se) = %.4f;", worst);
  for (double q : cfg.qs) {
    const double star = optimal_tau(cfg.delta_probe, rewards.max_gap(), q).continuous;
    for (double eps : cfg.eps_fps) {
      const ProbingGridPoint* best = nullptr;
      for (const auto& p : points) {
        if (p.q == q && p.eps_fp == eps && (!best || p.measured < best->measured)) best = &p;
      }
      const double ratio = static_cast<double>(best->tau) / star;
      ok &= ratio >= 0.5 && ratio <= 2.0;
      detail += fmt(" q=%.2f eps=%.1f", q, eps) + fmt(" argmin %.0f vs tau* %.2f;", static_cast<double>(best->tau), star);
    }
  }
  return ok;
}

bool gate_behaviour(std::string& detail) {
  GateConfig g;
  g.lambda_h = 0.1;
  g.delta_h = 0.5;
  g.tau_min = 1;
  Round first_fire = -1;
  for (Round since = 1; since <= 20 && first_fire < 0; ++since) {
    if (compute_gates(g, {100 + since, 100, std::nullopt, 0.0, 1.0}).hazard) first_fire = since;
  }
  bool ok = first_fire == 7;
  detail = "hazard fires at " + std::to_string(first_fire);

  GateConfig z;
  z.z_thresh = 2.0;
  z.sigma0 = 0.5;
  const bool at = compute_gates(z, {50, 0, ResidualInput{1.0, 0.0, 0.0}, 0.0, 1.0}).residual;
  const bool below = compute_gates(z, {50, 0, ResidualInput{0.9999, 0.0, 0.0}, 0.0, 1.0}).residual;
  ok &= at && !below;
  if (!at || below) detail += "; residual boundary wrong";

  GateConfig fuzz;
  fuzz.tau_min = 5;
  fuzz.z_thresh = 0.5;
  fuzz.m_thresh = 0.5;
  Rng rng(99);
  Round min_gap = 1 << 30;
  int starts = 0;
  {
    RandomizedProbingUcb p({}, fuzz);
    Round last = -1000000;
    for (Round t = 1; t <= 10000; ++t) {
      const ArmPair arms = p.select(t);
      if (p.last_was_probe()) {
        min_gap = std::min(min_gap, t - last);
        last = t;
        ++starts;
      }
      p.observe(arms, rng.uniform() * 2 - 0.5, rng.uniform() * 2 - 0.5);
    }
  }
  {
    SequentialProbingUcb p({}, fuzz);
    Round last = -1000000;
    bool second = false;
    for (Round t = 1; t <= 10000; ++t) {
      const Arm a = p.select(t);
      if (second) {
        second = false;
      } else if (p.last_was_probe()) {
        min_gap = std::min(min_gap, t - last);
        last = t;
        second = true;
        ++starts;
      }
      p.observe(a, rng.uniform() * 2 - 0.5);
    }
  }
  ok &= min_gap >= 5 && starts > 0;
  detail += "; min gap between probe starts " + std::to_string(min_gap) + " over " + std::to_string(starts);
  return ok;
}

bool determinism(const SweepResult& serial, const SweepConfig& cfg, std::string& detail) {
  const auto dir = fs::temp_directory_path() / "latent_bandit_acceptance";
  fs::remove_all(dir);
  emit_results(serial, cfg, dir / "serial");
  const auto parallel = run_sweep(cfg, 8);
  emit_results(parallel, cfg, dir / "parallel");
  const bool same = slurp(dir / "serial" / "summary.csv") == slurp(dir / "parallel" / "summary.csv");
  detail = same ? "summary.csv identical" : "summary.csv differs";

  // Replay every run of a few instances and compare with a direct run.
  bool replay_ok = true;
  const auto manifest = dir / "serial" / "manifest.json";
  const auto cells = expand_cells(cfg);
  int replayed = 0;
  for (std::size_t c : {std::size_t{0}, cells.size() - 1}) {
    const auto& summary = serial.cells[c];
    for (const auto& spec : resolved_algorithms(cfg)) {
      const std::size_t inst = (c * 7 + replayed) % cfg.num_instances;
      double total = 0;
      for (std::size_t run = 0; run < cfg.runs_per_instance; ++run) {
        const auto key = EpisodeKey{c, inst, run, spec.id}.to_string();
        const auto rec = replay_episode(manifest, key);
        auto direct = run_episode(spec, make_instance(cfg, cells[c], inst), cells[c].horizon,
                                        episode_seed(cfg.root_seed, c, inst, run),
                                        {cfg.dual_regret, cfg.dual_noise, false});
        direct.cell = c;
        direct.instance = inst;
        direct.run = run;
        replay_ok &= rec.to_json().dump() == direct.to_json().dump();
        total += rec.cumulative_regret();
        ++replayed;
      }
      const double mean = total / static_cast<double>(cfg.runs_per_instance);
      replay_ok &= std::abs(mean - summary.at(spec.id).instance_regret[inst]) <= 1e-9;
    }
  }
  detail += "; " + std::to_string(replayed) + " episodes replayed" + (replay_ok ? "" : " with mismatches");
  return same && replay_ok;
}

bool environment_statistics(std::string& detail) {
  bool ok = true;
  for (double p : {0.5, 0.9, 0.99}) {
    Environment env(sample_instance(10, 2, 3), make_transition_matrix(10, p), 0.1, 11);
    State prev = env.current_state();
    int switches = 0;
    for (int i = 0; i < 100000; ++i) {
      env.step_single(0);
      switches += env.current_state() != prev ? 1 : 0;
      prev = env.current_state();
    }
    const double rate = switches / 100000.0;
    ok &= std::abs(rate - (1.0 - p)) <= 0.005;
    detail += fmt("switch rate %.4f at p_stay %.2f; ", rate, p);
  }

  const std::size_t s = 5;
  Environment env(sample_instance(s, 2, 4), make_transition_matrix(s, 0.5), 0.1, 12);
  std::vector<double> occupancy(s, 0.0);
  for (int i = 0; i < 100000; ++i) occupancy[env.step_single(0).true_state] += 1.0;
  double l1 = 0;
  for (double o : occupancy) l1 += std::abs(o / 100000.0 - 1.0 / static_cast<double>(s));
  ok &= l1 <= 0.02;
  detail += fmt("occupancy L1 %.4f; ", l1);

  const double sigma = 0.1;
  Environment dual(RewardMatrix::from_rows({{0.5, 0.5}}), make_transition_matrix(1, 1.0), sigma, 13);
  double sum = 0, sq = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double r = dual.step_dual(0, 1).treatment_reward;
    sum += r;
    sq += r * r;
  }
  const double mean = sum / n;
  const double var = (sq - n * mean * mean) / (n - 1);
  const double ratio = var / (2 * sigma * sigma);
  ok &= std::abs(ratio - 1.0) <= 0.1;
  detail += fmt("dual variance / 2 sigma^2 = %.3f", ratio);
  return ok;
}

}  // namespace

int main() {
  Report report;
  report.criterion(1, "linear model matches batch ridge", oracle_equivalence);
  report.criterion(2, "fingerprints disambiguate the four-state example", disambiguation);

  SweepConfig desk;
  apply_preset(desk, Preset::kDesk);
  SweepResult sweep;
  const auto start = std::chrono::steady_clock::now();
  try {
    sweep = run_sweep(desk, 1);
  } catch (const std::exception& e) {
    std::printf("desk sweep failed: %s\n", e.what());
  }
  std::printf("desk sweep (serial): %.1fs\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());

  report.criterion(3, "default-cell orderings", [&](std::string& d) { return table_orderings(sweep, d); });
  report.criterion(4, "regime flips at S=2 and sigma=0.5", [&](std::string& d) { return regime_flips(sweep, d); });
  report.criterion(5, "probing bound holds and its minimiser is located", theorem_validation);
  report.criterion(6, "gate behaviour", gate_behaviour);
  report.criterion(7, "serial and parallel sweeps agree; replay is exact",
                   [&](std::string& d) { return determinism(sweep, desk, d); });
  report.criterion(8, "environment statistics", environment_statistics);

  std::printf("%zu of 8 criteria failed\n", report.failures.size());
  return report.failures.empty() ? 0 : 1;
}
