#include <doctest.h>

#include <cmath>
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "sleepsched/belief.hpp"
#include "sleepsched/got.hpp"

using namespace sleepsched;

TEST_SUITE("belief") {
  TEST_CASE("count normalization") {
    const RowMatrix p = normalized_proc_est(RowMatrix::from_rows({{3, 1}, {0, 4}}));
    CHECK(p(0, 0) == doctest::Approx(0.75));
    CHECK(p(0, 1) == doctest::Approx(0.25));
    CHECK(p(1, 0) == 0.0);
    CHECK(p(1, 1) == 1.0);
    const RowMatrix u = normalized_proc_est(RowMatrix(2, 2, 0.0));
    CHECK(u(0, 0) == 0.5);
    CHECK(u(1, 1) == 0.5);
  }

  TEST_CASE("self-transitions accumulate on the Laplace prior") {
    Belief b = initial_belief(2, 8, MetricKind::kAoii, 0);
    for (Step t = 0; t < 10; ++t) b = belief_update(b, t, StateIndex{0}, std::nullopt);
    const RowMatrix p = normalized_proc_est(b);
    CHECK(p(0, 0) == doctest::Approx(11.0 / 12.0));
    CHECK(p(0, 1) == doctest::Approx(1.0 / 12.0));
  }

  TEST_CASE("one asleep step multiplies by the estimate") {
    Belief b = initial_belief(2, 8, MetricKind::kAoii, 0);
    const RowMatrix p = RowMatrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
    const Belief next = propagate(b, p);
    CHECK(next.d_x[0] == doctest::Approx(0.9));
    CHECK(next.d_x[1] == doctest::Approx(0.1));
    CHECK(next.x_tx == 0);
  }

  TEST_CASE("waking in the same state adds the slept steps") {
    Belief b = initial_belief(3, 8, MetricKind::kAoii, 1);
    b = belief_update(b, 0, StateIndex{1}, std::nullopt);
    const double before = b.proc_counts(1, 1);
    b.n_sleep = 4;
    for (Step t = 1; t <= 4; ++t) b = belief_update(b, t, std::nullopt, std::nullopt);
    b = belief_update(b, 5, StateIndex{1}, std::nullopt);
    CHECK(b.proc_counts(1, 1) == before + 5);
  }

  TEST_CASE("waking in a new state splits the sleep around one transition") {
    Belief b = initial_belief(3, 8, MetricKind::kAoii, 0);
    b = belief_update(b, 0, StateIndex{0}, std::nullopt);
    const RowMatrix c0 = b.proc_counts;
    b.n_sleep = 5;
    b = wake_update(b, 6, 2, std::nullopt);
    CHECK(b.proc_counts(0, 0) == c0(0, 0) + 2);
    CHECK(b.proc_counts(0, 2) == c0(0, 2) + 1);
    CHECK(b.proc_counts(2, 2) == c0(2, 2) + 3);
  }

  TEST_CASE("lazy wake update equals step-by-step updates") {
    Belief a = initial_belief(3, 6, MetricKind::kAoii, 1);
    a.proc_counts = RowMatrix::from_rows({{5, 2, 1}, {1, 6, 2}, {1, 1, 4}});
    a = belief_update(a, 0, StateIndex{2}, AckReport{false, 0.9});
    a.n_sleep = 4;
    Belief b = a;
    for (Step t = 1; t <= 4; ++t) a = belief_update(a, t, std::nullopt, std::nullopt);
    a = belief_update(a, 5, StateIndex{0}, AckReport{true, 0.2});
    b = wake_update(b, 5, 0, AckReport{true, 0.2});
    CHECK(a.proc_counts == b.proc_counts);
    CHECK(a.d_x == b.d_x);
    CHECK(a.t_aoii.raw() == b.t_aoii.raw());
    CHECK(a.x_rx == b.x_rx);
  }

  TEST_CASE("contract violations") {
    Belief b = initial_belief(2, 4, MetricKind::kAoii, 0);
    CHECK_THROWS_AS(belief_update(b, 0, std::nullopt, std::nullopt), std::logic_error);
    b.n_sleep = 3;
    CHECK_THROWS_AS(belief_update(b, 1, StateIndex{0}, std::nullopt), std::logic_error);
    CHECK_THROWS_AS(belief_update(b, 1, std::nullopt, AckReport{}), std::logic_error);
    CHECK_THROWS_AS(wake_update(b, 1, 0, std::nullopt), std::logic_error);
    CHECK_THROWS_AS(initial_belief(1, 4, MetricKind::kAoii, 0), std::invalid_argument);
    CHECK_THROWS_AS(initial_belief(2, 4, MetricKind::kAoii, 2), std::invalid_argument);
  }

  TEST_CASE("ACK moves the believed receiver state, silence ages it") {
    Belief b = initial_belief(3, 5, MetricKind::kAoi, 0);
    b = belief_update(b, 0, StateIndex{2}, AckReport{false, 0.9});
    CHECK(b.x_rx == 0);
    CHECK(b.aoi_rx == 1);
    CHECK(b.d_aoi[1] == 1.0);
    b = belief_update(b, 1, StateIndex{2}, AckReport{true, 0.2});
    CHECK(b.x_rx == 2);
    CHECK(b.aoi_rx == 0);
    CHECK(b.d_x_rx[2] == 1.0);
  }

  TEST_CASE("tensor shift with point masses") {
    Tensor3 t(2, 6);
    t(1, 0, 2) = 1.0;
    const std::vector<double> d{0.0, 1.0};
    const RowMatrix p = RowMatrix::identity(2);
    const std::vector<StateIndex> rx{0};
    const Tensor3 next = tensor_update(t, d, d, p, rx);
    CHECK(next(1, 0, 3) == 1.0);
    CHECK(next(1, 0, 2) == 0.0);

    Tensor3 synced(2, 6);
    synced(1, 1, 4) = 1.0;
    const Tensor3 reset = tensor_update(synced, d, d, p, std::vector<StateIndex>{1});
    CHECK(reset(1, 1, 0) == 1.0);
  }

  TEST_CASE("tensor mass at the cap stays at the cap") {
    Tensor3 t(2, 3);
    t(1, 0, 3) = 0.5;
    t(1, 0, 2) = 0.5;
    const std::vector<double> d{0.0, 1.0};
    const Tensor3 next = tensor_update(t, d, d, RowMatrix::identity(2), std::vector<StateIndex>{0});
    CHECK(next(1, 0, 3) == doctest::Approx(1.0));
  }

  TEST_CASE("tensor update matches path enumeration on a fixed chain") {
    const RowMatrix p = RowMatrix::from_rows({{0.7, 0.3}, {0.5, 0.5}});
    CHECK(oracle::tensor_gap(p, 0, 0, 0, 6, 3) < 1e-9);
    CHECK(oracle::tensor_gap(p, 1, 0, 1, 6, 3) < 1e-9);
  }

  TEST_CASE("tensor update matches path enumeration on random three-state chains") {
    Rng rng(77);
    for (int c = 0; c < 30; ++c) {
      RowMatrix p(3, 3);
      for (std::size_t r = 0; r < 3; ++r) {
        double s = 0.0;
        for (auto& v : p.row(r)) s += (v = 0.05 + uniform01(rng));
        for (auto& v : p.row(r)) v /= s;
      }
      for (int steps = 1; steps <= 5; ++steps) {
        CHECK(oracle::tensor_gap(p, 0, 1, 2, 6, steps) < 1e-9);
        CHECK(oracle::tensor_gap(p, 2, 2, 0, 6, steps) < 1e-9);
      }
    }
  }

  TEST_CASE("full two-state oracle grid") {
    const auto s = oracle::run_tensor_suite();
    CHECK(s.cases == 81 * 5 * 4);
    CHECK(s.worst_tv < 1e-9);
  }

  TEST_CASE("expected cost of point masses reads one tensor entry") {
    const ProcessSpace space = temperature_space();
    const GoTensor g = make_got_a(space, {0, 1}, 1.0, 0.001, 16);
    Belief b = initial_belief(8, 16, MetricKind::kAoii, 0);
    b.d_x_rx.assign(8, 0.0);
    b.d_x_rx[5] = 1.0;
    b.t_aoii(0, 5, 0) = 0.0;
    b.t_aoii(0, 5, 1) = 0.0;
    b.t_aoii(0, 5, 7) = 1.0;
    CHECK(predict_cost(b, g) == doctest::Approx(7.0));
    GoTensor zero{Tensor3(8, 16), MetricKind::kAoii};
    CHECK(predict_cost(oracle::random_belief(3, 8, 16, MetricKind::kAoii), zero) == 0.0);
  }

  TEST_CASE("expected cost equals the triple sum") {
    const auto s = oracle::run_predict_suite();
    CHECK(s.cases == 100);
    CHECK(s.worst_abs <= 1e-12);
  }

  TEST_CASE("expected cost is linear in the tensor") {
    const Belief b = oracle::random_belief(41, 3, 4, MetricKind::kAoii);
    const GoTensor g1 = oracle::random_got(1, 3, 4, MetricKind::kAoii);
    const GoTensor g2 = oracle::random_got(2, 3, 4, MetricKind::kAoii);
    GoTensor mix = g1;
    for (std::size_t i = 0; i < mix.costs.raw().size(); ++i)
      mix.costs.raw()[i] = 2.0 * g1.costs.raw()[i] - 0.5 * g2.costs.raw()[i];
    CHECK(predict_cost(b, mix) ==
          doctest::Approx(2.0 * predict_cost(b, g1) - 0.5 * predict_cost(b, g2)));
  }

  TEST_CASE("expected cost rejects mismatched tensors") {
    const Belief b = oracle::random_belief(1, 3, 4, MetricKind::kAoii);
    CHECK_THROWS_AS(predict_cost(b, oracle::random_got(1, 3, 5, MetricKind::kAoii)),
                    std::invalid_argument);
    CHECK_THROWS_AS(predict_cost(b, oracle::random_got(1, 4, 4, MetricKind::kAoii)),
                    std::invalid_argument);
    CHECK_THROWS_AS(predict_cost(b, oracle::random_got(1, 3, 4, MetricKind::kAoi)),
                    std::invalid_argument);
  }

  TEST_CASE("conservation over random update sequences") {
    const auto s = oracle::run_conservation_suite(10'000);
    CHECK(s.worst_belief <= 1e-9);
    CHECK(s.worst_phase <= 1e-9);
    CHECK(s.distributions > 10'000);
  }

  TEST_CASE("transition counts never decrease") {
    Rng rng(5);
    Belief b = initial_belief(4, 8, MetricKind::kAoii, 0);
    for (Step t = 0; t < 400; ++t) {
      const RowMatrix before = b.proc_counts;
      if (b.awake_at(t)) {
        b = belief_update(b, t, static_cast<StateIndex>(uniform_int(rng, 0, 3)), std::nullopt);
        b.n_sleep = static_cast<int>(uniform_int(rng, 0, 3));
      } else {
        b = belief_update(b, t, std::nullopt, std::nullopt);
      }
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(b.proc_counts(i, j) >= before(i, j));
    }
  }

  TEST_CASE("mismatch probability and JSON dump") {
    Belief b = initial_belief(2, 4, MetricKind::kAoii, 0);
    CHECK(mismatch_probability(b) == 0.0);
    b.d_x = {0.25, 0.75};
    CHECK(mismatch_probability(b) == doctest::Approx(0.75));
    const auto j = belief_to_json(b);
    CHECK(j.at("metric") == "aoii");
    CHECK(j.at("t_aoii").size() == 2);
  }
}
