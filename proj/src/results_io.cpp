#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "latent_bandit/harness.hpp"

namespace latent_bandit {

const char* const kCodeVersion = "latent-bandit 0.1.0";

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> algorithm_columns(const SweepConfig& cfg) {
  std::vector<std::string> ids;
  for (const auto& a : resolved_algorithms(cfg)) ids.push_back(a.id);
  return ids;
}

std::string header(const std::vector<std::string>& columns) {
  std::string line = "varying_param,value";
  for (const auto& c : columns) line += "," + csv_field(c);
  return line + "\n";
}

template <typename Metric>
std::string per_cell_table(const SweepResult& result, const SweepConfig& cfg, Metric metric) {
  const auto columns = algorithm_columns(cfg);
  std::string out = header(columns);
  for (const auto& cell : result.cells) {
    out += csv_field(cell.cell.varying) + "," + csv_field(cell.cell.value);
    for (const auto& id : columns) {
      out += ",";
      if (!cell.complete) {
        out += "NA";
        continue;
      }
      out += fixed6(metric(cell.at(id)));
    }
    out += "\n";
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string summary_csv(const SweepResult& result, const SweepConfig& cfg) {
  return per_cell_table(result, cfg, [](const AlgorithmSummary& s) { return s.mean_regret; });
}

void emit_results(const SweepResult& result, const SweepConfig& cfg,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  write_file(out_dir / "summary.csv", summary_csv(result, cfg));
  write_file(out_dir / "stderr.csv",
             per_cell_table(result, cfg, [](const AlgorithmSummary& s) { return s.stderr_regret; }));
  write_file(out_dir / "wins.csv",
             per_cell_table(result, cfg, [](const AlgorithmSummary& s) { return s.win_rate; }));

  {
    std::ostringstream freq;
    freq << "cell,algorithm,t,frequency\n";
    for (const auto& cell : result.cells) {
      if (!cell.complete) continue;
      for (const auto& s : cell.algorithms) {
        const auto smooth = trailing_average(s.optimal_frequency, cfg.smoothing_window);
        for (std::size_t t = 0; t < smooth.size(); ++t) {
          freq << cell.cell.index << ',' << csv_field(s.algorithm) << ',' << t + 1 << ','
               << fixed6(smooth[t]) << '\n';
        }
      }
    }
    write_file(out_dir / "freq.csv", freq.str());
  }

  {
    std::ostringstream inst;
    inst << "cell,instance,algorithm,regret\n";
    for (const auto& cell : result.cells) {
      if (!cell.complete) continue;
      for (const auto& s : cell.algorithms) {
        for (std::size_t i = 0; i < s.instance_regret.size(); ++i) {
          inst << cell.cell.index << ',' << i << ',' << csv_field(s.algorithm) << ','
               << fixed6(s.instance_regret[i]) << '\n';
        }
      }
    }
    write_file(out_dir / "instances.csv", inst.str());
  }

  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"index", c.cell.index},
                     {"varying", c.cell.varying},
                     {"value", c.cell.value},
                     {"S", c.cell.num_states},
                     {"p_stay", c.cell.p_stay},
                     {"sigma", c.cell.sigma},
                     {"T", c.cell.horizon},
                     {"complete", c.complete},
                     {"error", c.error}});
  }
  const json manifest{
      {"code_version", kCodeVersion},
      {"root_seed", cfg.root_seed},
      {"config", config_to_json(cfg)},
      {"cells", cells},
      {"episode_id_format", "cell:instance:run:algorithm"},
      {"seeding",
       {{"instance", "derive(derive(derive(root, 'instance'), cell), instance)"},
        {"episode", "derive(derive(derive(derive(root, 'episode'), cell), instance), run)"},
        {"policy", "derive(episode, algorithm id)"}}},
  };
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  if (cfg.trace) {
    std::ostringstream trace;
    std::ostringstream probes;
    probes << "episode,t,gate_residual,gate_uncertainty,gate_hazard,fingerprint0,fingerprint1,"
              "margin,residual\n";
    for (const auto& rec : result.records) {
      trace << rec.to_json().dump() << '\n';
      const auto id = EpisodeKey{rec.cell, rec.instance, rec.run, rec.algorithm}.to_string();
      for (const auto& e : rec.probe_events) {
        probes << csv_field(id) << ',' << e.t << ',' << int(e.trace.gate_residual) << ','
               << int(e.trace.gate_uncertainty) << ',' << int(e.trace.gate_hazard) << ','
               << fixed6(e.trace.fingerprint0) << ',' << fixed6(e.trace.fingerprint1) << ','
               << fixed6(e.trace.margin) << ',' << fixed6(e.trace.residual) << '\n';
      }
    }
    write_file(out_dir / "trace.jsonl", trace.str());
    write_file(out_dir / "probes.csv", probes.str());
  }
}

std::string render_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + " is empty");

  const std::size_t ncol = rows.front().size();
  std::vector<std::size_t> width(ncol, 0);
  for (auto& row : rows) {
    row.resize(ncol);
    for (std::size_t c = 0; c < ncol; ++c) {
      // Table cells are shown with two decimals like the published table.
      if (&row != &rows.front() && c >= 2 && row[c] != "NA") {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", std::stod(row[c]));
        row[c] = buf;
      }
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c > 0) out << "  ";
      if (c < 2) {
        out << std::left << std::setw(static_cast<int>(width[c])) << rows[r][c];
      } else {
        out << std::right << std::setw(static_cast<int>(width[c])) << rows[r][c];
      }
    }
    out << '\n';
  }
  return out.str();
}

RunRecord replay_episode(const std::filesystem::path& manifest_path, const std::string& episode_id) {
  std::ifstream in(manifest_path);
  if (!in) throw ConfigError("cannot open manifest " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + manifest_path.string() + ": " + e.what());
  }
  if (!manifest.contains("config")) throw ConfigError("manifest has no config");
  const SweepConfig cfg = config_from_json(manifest.at("config"));
  const EpisodeKey key = EpisodeKey::parse(episode_id);

  const auto cells = expand_cells(cfg);
  if (key.cell >= cells.size()) throw ConfigError("episode cell index out of range");
  if (key.instance >= cfg.num_instances) throw ConfigError("episode instance index out of range");
  if (key.run >= cfg.runs_per_instance) throw ConfigError("episode run index out of range");
  const auto algorithms = resolved_algorithms(cfg);
  const auto it = std::find_if(algorithms.begin(), algorithms.end(),
                               [&](const AlgorithmSpec& a) { return a.id == key.algorithm; });
  if (it == algorithms.end()) throw ConfigError("algorithm '" + key.algorithm + "' not in manifest");

  const Cell& cell = cells[key.cell];
  const Instance instance = make_instance(cfg, cell, key.instance);
  RunRecord rec =
      run_episode(*it, instance, cell.horizon,
                  episode_seed(cfg.root_seed, cell.index, key.instance, key.run),
                  {cfg.dual_regret, cfg.dual_noise, cfg.trace});
  rec.cell = key.cell;
  rec.instance = key.instance;
  rec.run = key.run;
  return rec;
}

}  // namespace latent_bandit

namespace latent_bandit {

TheoryConfig::TheoryConfig() {
  for (Round tau = 2; tau <= 50; ++tau) taus.push_back(tau);
}

TheoryConfig theory_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("theory config must be a JSON object");
  static const std::vector<std::string> kFields{"rewards",   "taus",    "qs",          "eps_fps",
                                                "num_seeds", "horizon", "delta_probe", "root_seed"};
  TheoryConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
        throw ConfigError("unknown theory field '" + key + "'");
      }
    }
    if (j.contains("rewards")) cfg.rewards = j.at("rewards").get<std::vector<std::vector<double>>>();
    if (j.contains("taus")) cfg.taus = j.at("taus").get<std::vector<Round>>();
    if (j.contains("qs")) cfg.qs = j.at("qs").get<std::vector<double>>();
    if (j.contains("eps_fps")) cfg.eps_fps = j.at("eps_fps").get<std::vector<double>>();
    if (j.contains("num_seeds")) cfg.num_seeds = j.at("num_seeds").get<std::size_t>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<Round>();
    if (j.contains("delta_probe")) cfg.delta_probe = j.at("delta_probe").get<double>();
    if (j.contains("root_seed")) cfg.root_seed = j.at("root_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("theory config: ") + e.what());
  }
  if (cfg.taus.empty() || cfg.qs.empty() || cfg.eps_fps.empty() || cfg.num_seeds < 1) {
    throw ConfigError("theory grid lists must be nonempty and num_seeds >= 1");
  }
  return cfg;
}

std::vector<ProbingGridPoint> run_theory_grid(const TheoryConfig& cfg) {
  std::vector<ProbingGridPoint> points;
  try {
    const RewardMatrix rewards = RewardMatrix::from_rows(cfg.rewards);
    for (double q : cfg.qs) {
      for (double eps : cfg.eps_fps) {
        for (Round tau : cfg.taus) {
          const IdealizedProbingParams params{tau, cfg.horizon, cfg.delta_probe, eps};
          points.push_back(evaluate_probing_point(rewards, q, params, cfg.num_seeds, cfg.root_seed));
        }
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return points;
}

std::string theory_csv(std::span<const ProbingGridPoint> points) {
  std::ostringstream out;
  out << "q,eps_fp,tau,bound,measured,probe_cost,staleness,misclass,stderr,tail\n";
  for (const auto& p : points) {
    out << fixed6(p.q) << ',' << fixed6(p.eps_fp) << ',' << p.tau << ',' << fixed6(p.bound) << ','
        << fixed6(p.measured) << ',' << fixed6(p.probe_cost) << ',' << fixed6(p.staleness) << ','
        << fixed6(p.misclassification) << ',' << fixed6(p.stderr_measured) << ',' << fixed6(p.tail)
        << '\n';
  }
  return out.str();
}

}  // namespace latent_bandit
