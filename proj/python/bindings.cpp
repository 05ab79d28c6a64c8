#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latent_bandit/harness.hpp"
#include "latent_bandit/latent.hpp"
#include "latent_bandit/linmodel.hpp"
#include "latent_bandit/theory.hpp"

namespace py = pybind11;
namespace lb = latent_bandit;
using namespace py::literals;

namespace {

lb::RewardMatrix rewards_from(const std::vector<std::vector<double>>& rows) {
  return lb::RewardMatrix::from_rows(rows);
}

std::vector<std::vector<double>> rows_of(const lb::RewardMatrix& m) {
  std::vector<std::vector<double>> rows(m.num_states());
  for (lb::State s = 0; s < m.num_states(); ++s) {
    const auto row = m.row(s);
    rows[s].assign(row.begin(), row.end());
  }
  return rows;
}

std::string run_episode_json(const std::string& algorithm, const std::string& params,
                             const std::vector<std::vector<double>>& rewards, double p_stay,
                             double sigma, lb::Round horizon, std::uint64_t seed,
                             const std::string& dual_regret) {
  const lb::Instance inst{rewards_from(rewards), p_stay, sigma, seed};
  lb::EpisodeOptions options;
  if (dual_regret == "sum") {
    options.dual_regret = lb::DualRegret::kSum;
  } else if (dual_regret != "mean") {
    throw lb::ConfigError("dual_regret must be 'mean' or 'sum'");
  }
  const auto rec = lb::run_episode({algorithm, lb::json::parse(params)}, inst, horizon, seed, options);
  return rec.to_json().dump();
}

std::string run_sweep_json(const std::string& config, std::size_t workers,
                           const std::string& out_dir) {
  const auto cfg = lb::config_from_json(lb::json::parse(config));
  const auto result = lb::run_sweep(cfg, workers);
  if (!out_dir.empty()) lb::emit_results(result, cfg, out_dir);
  lb::json cells = lb::json::array();
  for (const auto& cell : result.cells) {
    lb::json algos = lb::json::object();
    for (const auto& a : cell.algorithms) {
      algos[a.algorithm] = {{"mean_regret", a.mean_regret},
                            {"stderr_regret", a.stderr_regret},
                            {"win_rate", a.win_rate},
                            {"probe_fraction", a.probe_fraction},
                            {"instance_regret", a.instance_regret}};
    }
    cells.push_back({{"index", cell.cell.index},
                     {"varying", cell.cell.varying},
                     {"value", cell.cell.value},
                     {"num_states", cell.cell.num_states},
                     {"p_stay", cell.cell.p_stay},
                     {"sigma", cell.cell.sigma},
                     {"horizon", cell.cell.horizon},
                     {"complete", cell.complete},
                     {"error", cell.error},
                     {"algorithms", algos}});
  }
  return lb::json{{"cells", cells}, {"summary_csv", lb::summary_csv(result, cfg)}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Latent-state bandit simulator and policies";

  py::register_exception<lb::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lb::NoStationaryDistribution>(m, "NoStationaryDistribution", PyExc_ValueError);

  m.attr("code_version") = lb::kCodeVersion;

  m.def("transition_matrix",
        [](std::size_t num_states, double p_stay) {
          const auto p = lb::make_transition_matrix(num_states, p_stay);
          std::vector<std::vector<double>> rows(num_states, std::vector<double>(num_states));
          for (lb::State i = 0; i < num_states; ++i) {
            for (lb::State j = 0; j < num_states; ++j) rows[i][j] = p.prob(i, j);
          }
          return rows;
        },
        py::arg("num_states"), py::arg("p_stay"));
  m.def("stationary_distribution",
        [](std::size_t num_states, double p_stay) {
          return lb::stationary_distribution(lb::make_transition_matrix(num_states, p_stay));
        },
        py::arg("num_states"), py::arg("p_stay"));
  m.def("sample_instance",
        [](std::size_t num_states, std::size_t num_arms, std::uint64_t seed) {
          return rows_of(lb::sample_instance(num_states, num_arms, seed));
        },
        py::arg("num_states"), py::arg("num_arms"), py::arg("seed"));

  m.def("lagged_features",
        [](lb::Arm prev_action, double prev_reward, std::size_t num_arms) {
          return lb::lagged_features({prev_action, prev_reward}, num_arms);
        },
        py::arg("prev_action"), py::arg("prev_reward"), py::arg("num_arms"));
  m.def("combined_features",
        [](double fp0, double fp1, lb::Arm prev_action, double prev_reward, std::size_t num_arms) {
          return lb::combined_features({fp0, fp1, 0}, {prev_action, prev_reward}, num_arms);
        },
        py::arg("fp0"), py::arg("fp1"), py::arg("prev_action"), py::arg("prev_reward"),
        py::arg("num_arms"));

  py::class_<lb::ArmLinearModel>(m, "ArmLinearModel")
      .def(py::init<std::size_t, double>(), py::arg("dim"), py::arg("reg") = 1.0)
      .def("update", &lb::ArmLinearModel::update, py::arg("x"), py::arg("reward"))
      .def("theta", &lb::ArmLinearModel::theta)
      .def("ucb_score", &lb::ArmLinearModel::ucb_score, py::arg("x"), py::arg("alpha"))
      .def("predict",
           [](const lb::ArmLinearModel& model, const lb::ContextVector& x) {
             const auto p = model.predict(x);
             return py::make_tuple(p.mean, p.variance);
           },
           py::arg("x"))
      .def_property_readonly("num_updates", &lb::ArmLinearModel::num_updates);

  py::class_<lb::GateConfig>(m, "GateConfig")
      .def(py::init<>())
      .def_readwrite("z_thresh", &lb::GateConfig::z_thresh)
      .def_readwrite("sigma0", &lb::GateConfig::sigma0)
      .def_readwrite("m_thresh", &lb::GateConfig::m_thresh)
      .def_readwrite("lambda_h", &lb::GateConfig::lambda_h)
      .def_readwrite("delta_h", &lb::GateConfig::delta_h)
      .def_readwrite("tau_min", &lb::GateConfig::tau_min);
  m.def("compute_gates",
        [](const lb::GateConfig& cfg, lb::Round t, lb::Round last_probe,
           std::optional<std::tuple<double, double, double>> last, double ucb0, double ucb1) {
          std::optional<lb::ResidualInput> residual;
          if (last) residual = lb::ResidualInput{std::get<0>(*last), std::get<1>(*last), std::get<2>(*last)};
          const auto d = lb::compute_gates(cfg, {t, last_probe, residual, ucb0, ucb1});
          return py::dict("probe"_a = d.probe(), "residual"_a = d.residual,
                          "uncertainty"_a = d.uncertainty, "hazard"_a = d.hazard,
                          "spacing_ok"_a = d.spacing_ok, "z"_a = d.z, "margin"_a = d.margin);
        },
        py::arg("config"), py::arg("t"), py::arg("last_probe"), py::arg("last"), py::arg("ucb0"),
        py::arg("ucb1"));

  m.def("regret_rate_bound",
        [](double delta_probe, double delta_max, double q, lb::Round tau, double eps_fp,
           lb::Round horizon) {
          const auto b = lb::regret_rate_bound({delta_probe, delta_max, q, tau, eps_fp, horizon});
          return py::dict("rate"_a = b.rate(), "probe"_a = b.probe_term,
                          "staleness"_a = b.staleness_term, "misclassification"_a = b.misclass_term,
                          "tail"_a = b.tail);
        },
        py::arg("delta_probe"), py::arg("delta_max"), py::arg("q"), py::arg("tau"),
        py::arg("eps_fp") = 0.0, py::arg("horizon") = 0);
  m.def("optimal_tau",
        [](double delta_probe, double delta_max, double q) {
          const auto o = lb::optimal_tau(delta_probe, delta_max, q);
          return py::dict("unbounded"_a = o.unbounded, "continuous"_a = o.continuous,
                          "lower"_a = o.lower, "upper"_a = o.upper, "best"_a = o.best);
        },
        py::arg("delta_probe"), py::arg("delta_max"), py::arg("q"));
  m.def("simulate_idealized_probing",
        [](const std::vector<std::vector<double>>& rewards, double p_stay, lb::Round tau,
           lb::Round horizon, double delta_probe, double eps_fp, std::uint64_t seed) {
          const auto r = lb::simulate_idealized_probing(
              rewards_from(rewards), lb::make_transition_matrix(2, p_stay),
              {tau, horizon, delta_probe, eps_fp}, seed);
          return py::dict("rate"_a = r.rate, "probe_cost"_a = r.probe_cost,
                          "staleness"_a = r.staleness, "misclassification"_a = r.misclassification,
                          "probes"_a = r.probes);
        },
        py::arg("rewards"), py::arg("p_stay"), py::arg("tau"), py::arg("horizon"),
        py::arg("delta_probe"), py::arg("eps_fp") = 0.0, py::arg("seed") = 0);

  m.def("known_algorithms", &lb::known_algorithms);
  m.def("winning_rates", &lb::winning_rates, py::arg("regret"));
  m.def("_run_episode", &run_episode_json, py::call_guard<py::gil_scoped_release>());
  m.def("_run_sweep", &run_sweep_json, py::call_guard<py::gil_scoped_release>());
}
