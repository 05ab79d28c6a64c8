#include <doctest.h>

#include <cmath>

#include "latent_bandit/theory.hpp"

using namespace latent_bandit;

namespace {

RewardMatrix two_state() { return RewardMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}}); }

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("bound terms") {
  const auto b = regret_rate_bound({0.5, 1.0, 0.01, 7, 0.0, 0});
  CHECK(b.probe_term == doctest::Approx(0.5 / 7.0));
  CHECK(b.staleness_term == doctest::Approx(0.035));
  CHECK(b.rate() == doctest::Approx(0.1064285714).epsilon(1e-9));
  CHECK(b.tail == 0.0);

  const auto with_eps = regret_rate_bound({0.5, 0.7, 0.01, 7, 1.0, 0});
  const auto without = regret_rate_bound({0.5, 0.7, 0.01, 7, 0.0, 0});
  CHECK(with_eps.rate() - without.rate() == doctest::Approx(0.7));

  const auto still = regret_rate_bound({0.5, 1.0, 0.0, 4, 0.0, 0});
  CHECK(still.rate() == doctest::Approx(0.125));

  CHECK(regret_rate_bound({0.5, 1.0, 0.01, 10, 0.0, 20000}).tail == doctest::Approx(10.0 / 20000.0));
  CHECK_THROWS_AS(regret_rate_bound({0.5, 1.0, 0.01, 0, 0.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(regret_rate_bound({0.5, 1.0, 0.01, 3, 1.5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(regret_rate_bound({0.5, 1.2, 0.01, 3, 0.0, 0}), std::invalid_argument);
}

TEST_CASE("optimal interval") {
  const auto opt = optimal_tau(0.5, 1.0, 0.01);
  CHECK(opt.continuous == doctest::Approx(7.0710678).epsilon(1e-7));
  CHECK(opt.lower == 7);
  CHECK(opt.upper == 8);
  // 0.5/7 + 0.035 = 0.10643 against 0.5/8 + 0.04 = 0.1025.
  const double at7 = 0.5 / 7 + 0.01 * 7 / 2;
  const double at8 = 0.5 / 8 + 0.01 * 8 / 2;
  CHECK(opt.best == (at7 <= at8 ? 7 : 8));

  CHECK(optimal_tau(2.0, 1.0, 0.01).continuous == doctest::Approx(2.0 * opt.continuous));

  const auto never = optimal_tau(0.5, 1.0, 0.0);
  CHECK(never.unbounded);
  CHECK(std::isinf(never.continuous));
  CHECK_THROWS_AS(optimal_tau(0.5, 0.0, 0.01), std::invalid_argument);
}

TEST_CASE("natural probe cost") {
  const auto m = two_state();
  const std::vector<double> pi{0.5, 0.5};
  // State 0 gaps (0, 0.8), state 1 gaps (0.6, 0).
  CHECK(natural_probe_cost(m, pi) == doctest::Approx(0.7));
  CHECK_THROWS_AS(natural_probe_cost(m, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("frozen chain with perfect probes has no staleness or misclassification") {
  const auto r = simulate_idealized_probing(two_state(), make_transition_matrix(2, 1.0), {10, 5000, 0.5, 0.0}, 3);
  CHECK(r.staleness == 0.0);
  CHECK(r.misclassification == 0.0);
  CHECK(r.rate == doctest::Approx(0.5 / 10.0));
  CHECK(r.probes == 500);
}

TEST_CASE("always-wrong probes pay the wrong-arm gap on every exploit round") {
  const auto m = RewardMatrix::from_rows({{0.9, 0.1}, {0.1, 0.9}});
  for (Round tau : {2, 5, 10}) {
    const auto r = simulate_idealized_probing(m, make_transition_matrix(2, 1.0), {tau, 1000, 0.5, 1.0}, 11);
    const double expected = 0.5 / static_cast<double>(tau) + 0.8 * static_cast<double>(tau - 1) / static_cast<double>(tau);
    CHECK(r.rate == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.staleness == 0.0);
  }
  // Slow switching: close to the frozen-chain formula.
  const auto r = simulate_idealized_probing(m, make_transition_matrix(2, 0.999), {5, 200000, 0.5, 1.0}, 12);
  CHECK(std::abs(r.rate - (0.1 + 0.8 * 0.8)) < 0.01);
}

TEST_CASE("decomposition adds up") {
  for (double eps : {0.0, 0.1, 0.5}) {
    for (Round tau : {1, 3, 17}) {
      const auto r =
          simulate_idealized_probing(two_state(), make_transition_matrix(2, 0.95), {tau, 7001, 0.4, eps}, 5);
      CHECK(r.probe_cost + r.staleness + r.misclassification == doctest::Approx(r.rate).epsilon(1e-12));
      CHECK(r.probe_rounds + r.stale_rounds + r.misclassified_rounds == 7001);
    }
  }
}

TEST_CASE("simulator hypotheses") {
  const auto p3 = make_transition_matrix(3, 0.9);
  CHECK_THROWS_AS(simulate_idealized_probing(sample_instance(3, 2, 1), p3, {}, 1), std::invalid_argument);
  const auto tied = RewardMatrix::from_rows({{0.5, 0.5}, {0.2, 0.8}});
  CHECK_THROWS_AS(simulate_idealized_probing(tied, make_transition_matrix(2, 0.9), {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_idealized_probing(two_state(), make_transition_matrix(2, 0.9), {0, 100, 0.5, 0.0}, 1),
                  std::invalid_argument);
}

TEST_CASE("simulation is deterministic and the grid point respects the bound") {
  const IdealizedProbingParams params{8, 20000, 0.5, 0.1};
  const auto a = simulate_idealized_probing(two_state(), make_transition_matrix(2, 0.95), params, 9);
  const auto b = simulate_idealized_probing(two_state(), make_transition_matrix(2, 0.95), params, 9);
  CHECK(a.rate == b.rate);
  const auto pt = evaluate_probing_point(two_state(), 0.05, params, 16, 1);
  CHECK(pt.measured <= pt.bound + 3.0 * pt.stderr_measured);
  CHECK(pt.stderr_measured > 0.0);
}

}  // TEST_SUITE
