#include <doctest.h>

#include <cmath>
#include <numeric>

#include "latent_bandit/env.hpp"
#include "support.hpp"

using namespace latent_bandit;

TEST_SUITE("env") {

TEST_CASE("transition matrix construction") {
  SUBCASE("two states, p_stay 0.5") {
    const auto p = make_transition_matrix(2, 0.5);
    CHECK(p.values() == std::vector<double>{0.5, 0.5, 0.5, 0.5});
  }
  SUBCASE("single state ignores p_stay") {
    const auto p = make_transition_matrix(1, 0.99);
    CHECK(p.values() == std::vector<double>{1.0});
  }
  SUBCASE("four states, p_stay 0.95") {
    const auto p = make_transition_matrix(4, 0.95);
    for (State i = 0; i < 4; ++i) {
      double row = 0.0;
      for (State j = 0; j < 4; ++j) {
        CHECK(p.prob(i, j) == doctest::Approx(i == j ? 0.95 : 0.05 / 3.0).epsilon(1e-15));
        row += p.prob(i, j);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(make_transition_matrix(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_transition_matrix(3, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_transition_matrix(3, 1.1), std::invalid_argument);
  }
}

TEST_CASE("transition matrix validation") {
  CHECK_THROWS_AS(TransitionMatrix(2, {0.5, 0.6, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TransitionMatrix(2, {1.5, -0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TransitionMatrix(2, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("stationary distribution") {
  SUBCASE("symmetric construction is uniform") {
    for (std::size_t s : {2u, 3u, 10u, 50u}) {
      for (double p : {0.0, 0.5, 0.99}) {
        if (s == 2 && p == 0.0) continue;  // periodic swap
        const auto pi = stationary_distribution(make_transition_matrix(s, p));
        for (double v : pi) CHECK(v == doctest::Approx(1.0 / static_cast<double>(s)).epsilon(1e-10));
      }
    }
  }
  SUBCASE("asymmetric two-state chain") {
    // Balance: pi0 * 0.1 = pi1 * 0.3 with pi0 + pi1 = 1.
    const TransitionMatrix p(2, {0.9, 0.1, 0.3, 0.7});
    const auto pi = stationary_distribution(p);
    CHECK(pi[0] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(pi[1] == doctest::Approx(0.25).epsilon(1e-10));
    // pi P = pi
    for (State j = 0; j < 2; ++j) {
      CHECK(pi[0] * p.prob(0, j) + pi[1] * p.prob(1, j) == doctest::Approx(pi[j]).epsilon(1e-10));
    }
  }
  SUBCASE("single state") { CHECK(stationary_distribution(make_transition_matrix(1, 0.3)) == std::vector<double>{1.0}); }
  SUBCASE("absorbing chain has no unique distribution") {
    CHECK_THROWS_AS(stationary_distribution(make_transition_matrix(3, 1.0)), NoStationaryDistribution);
  }
  SUBCASE("periodic chain is rejected") {
    CHECK_THROWS_AS(stationary_distribution(TransitionMatrix(2, {0.0, 1.0, 1.0, 0.0})),
                    NoStationaryDistribution);
  }
}

TEST_CASE("sample_instance") {
  const auto a = sample_instance(20, 3, 7);
  const auto b = sample_instance(20, 3, 7);
  CHECK(a == b);
  CHECK_FALSE(a == sample_instance(20, 3, 8));
  for (double v : a.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const auto big = sample_instance(5000, 2, 11);
  const double mean =
      std::accumulate(big.values().begin(), big.values().end(), 0.0) / static_cast<double>(big.values().size());
  CHECK(std::abs(mean - 0.5) < 0.02);
  CHECK_THROWS_AS(sample_instance(0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_instance(2, 0, 1), std::invalid_argument);
}

TEST_CASE("reward matrix queries") {
  const auto m = test_support::ambiguity_matrix();
  CHECK(m.optimal_arm(0) == 0);
  CHECK(m.optimal_arm(1) == 1);
  CHECK(m.optimal_arm(2) == 0);
  CHECK(m.gap(3, 1) == doctest::Approx(0.3));
  CHECK(m.max_gap() == doctest::Approx(0.3));
  const auto flat = RewardMatrix::from_rows({{0.2, 0.2, 0.2}});
  CHECK(flat.optimal_arm(0) == 0);
  CHECK_THROWS_AS(RewardMatrix::from_rows({{0.2, 1.2}}), std::invalid_argument);
  CHECK_THROWS_AS(RewardMatrix::from_rows({{0.2, 0.3}, {0.1}}), std::invalid_argument);
}

TEST_CASE("noiseless single step reads the mean of the current state") {
  Environment env(test_support::ambiguity_matrix(), make_transition_matrix(4, 1.0), 0.0, 1);
  env.set_state(2);
  const auto out = env.step_single(0);
  CHECK(out.reward == 0.6);
  CHECK(out.true_state == 2);
  CHECK(out.optimal_arm == 0);
  CHECK(out.gap == 0.0);
  CHECK_THROWS_AS(env.step_single(2), std::invalid_argument);
  CHECK_THROWS_AS(env.set_state(4), std::invalid_argument);
}

TEST_CASE("noiseless dual step returns the fingerprint") {
  Environment env(test_support::ambiguity_matrix(), make_transition_matrix(4, 1.0), 0.0, 1);
  env.set_state(1);
  const auto out = env.step_dual(0, 1);
  CHECK(out.control_reward == 0.4);
  CHECK(out.treatment_reward == 0.5);
  CHECK(out.control_gap == doctest::Approx(0.1));
  CHECK(out.treatment_gap == 0.0);
  const auto same = env.step_dual(1, 1);
  CHECK(same.control_reward == same.treatment_reward);
  CHECK_THROWS_AS(env.step_dual(0, 5), std::invalid_argument);
}

TEST_CASE("gaps are non-negative and bounded by the largest gap") {
  const auto m = sample_instance(6, 3, 99);
  Environment env(m, make_transition_matrix(6, 0.8), 0.3, 5);
  for (int i = 0; i < 2000; ++i) {
    const auto out = env.step_single(static_cast<Arm>(i % 3));
    CHECK(out.gap >= 0.0);
    CHECK(out.gap <= m.max_gap());
    CHECK(out.true_state < 6);
  }
}

TEST_CASE("absorbing chain never moves") {
  Environment env(sample_instance(5, 2, 3), make_transition_matrix(5, 1.0), 0.1, 17);
  const State start = env.current_state();
  for (int i = 0; i < 1000; ++i) CHECK(env.step_single(0).true_state == start);
  CHECK(env.current_state() == start);
}

TEST_CASE("state trajectory does not depend on the arms played") {
  const auto m = sample_instance(10, 2, 4);
  const auto p = make_transition_matrix(10, 0.7);
  Environment a(m, p, 0.2, 1234);
  Environment b(m, p, 0.2, 1234);
  Rng arms(5);
  for (int i = 0; i < 5000; ++i) {
    const auto sa = a.step_single(0);
    const auto sb = i % 2 ? b.step_single(arms.uniform_index(2)).true_state
                          : b.step_dual(1, 0).true_state;
    CHECK(sa.true_state == sb);
  }
}

TEST_CASE("same seed and calls give a bit-identical trajectory") {
  const auto m = sample_instance(3, 2, 4);
  const auto p = make_transition_matrix(3, 0.9);
  Environment a(m, p, 0.5, 77);
  Environment b(m, p, 0.5, 77);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.step_single(static_cast<Arm>(i % 2));
    const auto y = b.step_single(static_cast<Arm>(i % 2));
    CHECK(x.reward == y.reward);
    CHECK(x.true_state == y.true_state);
  }
}

TEST_CASE("dual-unit noise readings") {
  const auto m = RewardMatrix::from_rows({{0.5, 0.5}});
  const auto p = make_transition_matrix(1, 1.0);
  const double sigma = 0.1;
  for (auto mode : {DualNoise::kPerUnitDoubled, DualNoise::kSplitTotal}) {
    Environment env(m, p, sigma, 3, mode);
    const double expected = mode == DualNoise::kPerUnitDoubled ? 2 * sigma * sigma : sigma * sigma;
    CHECK(env.dual_unit_noise_sd() * env.dual_unit_noise_sd() == doctest::Approx(expected));
    const int n = 20000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto out = env.step_dual(0, 1);
      sum += out.control_reward;
      sq += out.control_reward * out.control_reward;
    }
    const double mean = sum / n;
    const double var = (sq - n * mean * mean) / (n - 1);
    CHECK(std::abs(var / expected - 1.0) < 0.05);
  }
}

TEST_CASE("invalid environment parameters") {
  const auto m = sample_instance(2, 2, 1);
  CHECK_THROWS_AS(Environment(m, make_transition_matrix(3, 0.5), 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(Environment(m, make_transition_matrix(2, 0.5), -0.1, 1), std::invalid_argument);
}

}  // TEST_SUITE
