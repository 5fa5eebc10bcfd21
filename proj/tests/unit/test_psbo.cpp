#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "oracles.hpp"
#include "sleepsched/got.hpp"
#include "sleepsched/psbo.hpp"

using namespace sleepsched;

TEST_SUITE("psbo") {
  TEST_CASE("link estimator priors and updates") {
    LinkEstimator link;
    CHECK(link.success_rate() == 0.5);
    CHECK(link.mean_antenna_time() == doctest::Approx(0.064));
    link.record(true, 0.2);
    CHECK(link.success_rate() == doctest::Approx(2.0 / 3.0));
    CHECK(link.mean_antenna_time() == doctest::Approx((0.064 + 0.2) / 2.0));
    link.record(false, 0.9);
    CHECK(link.success_rate() == doctest::Approx(0.5));
    CHECK(link.mean_antenna_time() == doctest::Approx((0.064 + 0.2) / 2.0));
    LinkEstimator never(0.064, 0.0, 1000.0);
    CHECK(never.success_rate() == 0.01);
  }

  TEST_CASE("transmission weights are geometric") {
    const auto p = transmission_weights(0.5, 4);
    REQUIRE(p.size() == 4);
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.25);
    CHECK(p[2] == 0.125);
    CHECK(p[3] == 0.0625);
    for (double s : {0.01, 0.3, 0.99}) {
      const auto q = transmission_weights(s, 10);
      const double sum = std::accumulate(q.begin(), q.end(), 0.0);
      CHECK(sum == doctest::Approx(1.0 - std::pow(1.0 - s, 10)));
      CHECK(sum <= 1.0);
    }
    CHECK_THROWS_AS(transmission_weights(0.5, 0), std::invalid_argument);
  }

  TEST_CASE("expected antenna time") {
    const EnergyProfile e;
    // s = 0.5: 0.5 * 0.2 + 0.5 * 0.9 / 0.5 = 1.0, capped by what is left of the step.
    CHECK(expected_antenna_time(0.5, 0.2, 0.9, e, 0.948) == doctest::Approx(0.948));
    CHECK(expected_antenna_time(0.99, 0.2, 0.9, e, 0.948) ==
          doctest::Approx(0.99 * 0.2 + 0.01 * 0.9 / 0.99));
    CHECK(expected_antenna_time(0.0, 0.2, 0.9, e, 2.0) == doctest::Approx(1.0));
  }

  TEST_CASE("transmission step energy") {
    const EnergyProfile e;
    const double woke = tx_step_energy(true, 1.0, 0.1, e);
    CHECK(woke == doctest::Approx(0.047 * 0.19125 + 0.052 * 0.14345 + 0.1 * 0.50755 +
                                  (1.0 - 0.047 - 0.052 - 0.1) * 0.00487));
    const double awake = tx_step_energy(false, 0.5, 0.1, e);
    CHECK(awake == doctest::Approx(0.052 * 0.14345 + 0.05 * 0.50755 + (1.0 - 0.052 - 0.05) * 0.13795));
  }

  TEST_CASE("static process with a synchronized receiver sleeps as long as allowed") {
    const ProcessSpace space = temperature_space();
    const GoTensor got = make_got_a(space, {0, 1}, 1.0, 0.001, 64);
    Belief b = initial_belief(8, 64, MetricKind::kAoii, 4, 0.0);
    for (StateIndex i = 0; i < 8; ++i) b.proc_counts(i, i) = 1.0;
    for (int max_sleep : {1, 17, 300}) {
      PsboParams params;
      params.max_sleep = max_sleep;
      CHECK(psbo_decide(b, LinkEstimator(), got, CostWeights{}, EnergyProfile{}, params) ==
            max_sleep);
    }
  }

  TEST_CASE("convex data cost: search matches the exhaustive sweep") {
    const auto s = oracle::run_psbo_suite();
    CHECK(s.static_max_sleep);
    CHECK(s.convex_cases == 300);
    INFO(s.first_mismatch);
    CHECK(s.convex_matches == s.convex_cases);
  }

  TEST_CASE("linear data cost with an interior optimum") {
    const EnergyProfile e;
    PsboParams params;
    std::vector<StepForecast> f;
    for (int j = 1; j <= params.max_sleep + params.max_tx_steps; ++j) f.push_back({0.001 * j, 1.0});
    LinkEstimator link(0.1, 900.0, 1000.0);
    const int n = psbo_search([&](int j) { return f[std::size_t(j - 1)]; }, link, CostWeights{}, e,
                              params);
    const int want = oracle::psbo_exhaustive(f, link.success_rate(), link.mean_antenna_time(),
                                             CostWeights{}, e, params);
    CHECK(n == want);
    CHECK(n > 0);
    CHECK(n < params.max_sleep);
  }

  TEST_CASE("search stays in range on arbitrary forecasts") {
    Rng rng(9);
    const EnergyProfile e;
    for (int c = 0; c < 200; ++c) {
      PsboParams params;
      params.max_sleep = static_cast<int>(uniform_int(rng, 1, 60));
      params.max_tx_steps = static_cast<int>(uniform_int(rng, 1, 5));
      auto f = [&](int) { return StepForecast{5.0 * uniform01(rng), uniform01(rng)}; };
      const int n = psbo_search(f, LinkEstimator(), CostWeights{1.0, uniform01(rng)}, e, params);
      CHECK(n >= 0);
      CHECK(n <= params.max_sleep);
    }
    PsboParams bad;
    bad.max_sleep = 0;
    CHECK_THROWS_AS(psbo_search([](int) { return StepForecast{}; }, LinkEstimator(), CostWeights{},
                                e, bad),
                    std::invalid_argument);
  }

  TEST_CASE("a known critical mismatch shortens the sleep") {
    const ProcessSpace space = temperature_space();
    const GoTensor got = make_got_a(space, {0, 1}, 1.0, 0.001, 64);
    // Static estimate for both; only the receiver differs.
    Belief synced = initial_belief(8, 64, MetricKind::kAoii, 4, 0.0);
    for (StateIndex i = 0; i < 8; ++i) synced.proc_counts(i, i) = 1.0;
    Belief critical = belief_update(synced, 0, StateIndex{0}, AckReport{false, 0.9});
    synced = belief_update(synced, 0, StateIndex{4}, std::nullopt);
    const int calm = psbo_decide(synced, LinkEstimator(), got, CostWeights{}, EnergyProfile{}, {});
    const int urgent =
        psbo_decide(critical, LinkEstimator(), got, CostWeights{}, EnergyProfile{}, {});
    CHECK(calm == PsboParams{}.max_sleep);
    CHECK(urgent <= 3);
  }
}
