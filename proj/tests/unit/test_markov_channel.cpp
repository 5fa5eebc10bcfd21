#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "sleepsched/channel.hpp"
#include "sleepsched/errors.hpp"
#include "sleepsched/markov.hpp"

using namespace sleepsched;

namespace {

DelayTrace trace_of(std::initializer_list<double> delays) {
  DelayTrace t;
  Step s = 0;
  for (double d : delays) t.samples.push_back({s++, d});
  return t;
}

void check_row_stochastic(const MarkovChain& c) {
  for (std::size_t r = 0; r < c.n_states(); ++r) {
    double s = 0.0;
    for (double v : c.transitions().row(r)) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}

}  // namespace

TEST_SUITE("markov") {
  TEST_CASE("step_chain on deterministic chains") {
    Rng rng(1);
    CHECK(step_chain(MarkovChain(RowMatrix::identity(5)), 3, rng) == 3);
    const MarkovChain swap(RowMatrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(step_chain(swap, 0, rng) == 1);
    CHECK_THROWS_AS(step_chain(swap, 2, rng), std::invalid_argument);
  }

  TEST_CASE("step_chain frequencies follow the row") {
    Rng rng(11);
    const MarkovChain c(RowMatrix::from_rows({{0.9, 0.1}, {0.5, 0.5}}));
    int zeros = 0;
    for (int i = 0; i < 100'000; ++i) zeros += step_chain(c, 0, rng) == 0;
    CHECK(zeros / 1e5 == doctest::Approx(0.9).epsilon(0.01 / 0.9));
  }

  TEST_CASE("rows must be stochastic") {
    CHECK_THROWS_AS(MarkovChain(RowMatrix::from_rows({{0.5, 0.4}, {0, 1}})), std::invalid_argument);
    CHECK_THROWS_AS(MarkovChain(RowMatrix::from_rows({{1.2, -0.2}, {0, 1}})),
                    std::invalid_argument);
  }

  TEST_CASE("adjacent-state process") {
    const auto c3 = adjacent_state_process(3, 0.01);
    CHECK(c3(1, 0) == doctest::Approx(0.005));
    CHECK(c3(1, 1) == doctest::Approx(0.99));
    CHECK(c3(1, 2) == doctest::Approx(0.005));
    CHECK(adjacent_state_process(3, 0.0).transitions() == RowMatrix::identity(3));
    const auto c2 = adjacent_state_process(2, 0.5);
    CHECK(c2(0, 0) == doctest::Approx(0.5));
    CHECK(c2(1, 0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(adjacent_state_process(1, 0.1), std::invalid_argument);

    const auto c8 = adjacent_state_process(8, 0.3);
    check_row_stochastic(c8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) CHECK(c8(i, j) == c8(7 - i, 7 - j));
  }

  TEST_CASE("stationary distribution solves pi P = pi") {
    const MarkovChain c(RowMatrix::from_rows({{0.7, 0.3}, {0.5, 0.5}}));
    const auto pi = stationary_distribution(c);
    CHECK(pi[0] == doctest::Approx(0.625));
    CHECK(pi[1] == doctest::Approx(0.375));
    const auto uniform = stationary_distribution(MarkovChain(RowMatrix::identity(4)));
    for (double v : uniform) CHECK(v == doctest::Approx(0.25));
  }

  TEST_CASE("sample_index and derived seeds") {
    Rng rng(3);
    const std::vector<double> p{0.0, 1.0, 0.0};
    CHECK(sample_index(p, rng) == 1);
    CHECK(derive_seed(1, {0, 1, 2}) == derive_seed(1, {0, 1, 2}));
    CHECK(derive_seed(1, {0, 1, 2}) != derive_seed(1, {0, 2, 1}));
    CHECK(derive_seed(1, {0}) != derive_seed(2, {0}));
    Rng a = make_rng(RngSeed{5, 1}, 0);
    Rng b = make_rng(RngSeed{5, 1}, 1);
    CHECK(a() != b());
  }

  TEST_CASE("uniform_int covers its range without bias") {
    Rng rng(8);
    std::vector<int> hits(6, 0);
    for (int i = 0; i < 60'000; ++i) ++hits[static_cast<std::size_t>(uniform_int(rng, 0, 5))];
    for (int h : hits) CHECK(std::abs(h - 10'000) < 400);
  }
}

TEST_SUITE("channel") {
  TEST_CASE("constant trace fits a single absorbing state") {
    const auto m = fit_channel_from_trace(trace_of({50, 50, 50}), 20.0, 0.1);
    REQUIRE(m.n_states() == 1);
    CHECK(m.chain(0, 0) == 1.0);
    CHECK(m.states[0].round_trip() * 1000.0 == doctest::Approx(50.0));
    CHECK(m.states[0].data_erasure == 0.1);
  }

  TEST_CASE("alternating trace fits a swap chain") {
    const auto m = fit_channel_from_trace(trace_of({50, 75, 50, 75}), 20.0, 0.0);
    REQUIRE(m.n_states() == 2);
    CHECK(m.chain(0, 1) == 1.0);
    CHECK(m.chain(1, 0) == 1.0);
    CHECK(m.states[0].data_delay == doctest::Approx(0.025));
    CHECK(m.states[0].feedback_delay == doctest::Approx(0.025));
  }

  TEST_CASE("repeated pattern matches counted transitions") {
    DelayTrace t;
    for (int i = 0; i < 100; ++i)
      for (double d : {45.0, 45.0, 65.0}) t.samples.push_back({Step(t.samples.size()), d});
    const auto m = fit_channel_from_trace(t, 20.0, 0.0);
    REQUIRE(m.n_states() == 2);
    CHECK(m.chain(0, 0) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(m.chain(0, 1) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(m.chain(1, 0) == 1.0);
  }

  TEST_CASE("invalid traces are rejected") {
    CHECK_THROWS_AS(fit_channel_from_trace(DelayTrace{}, 20.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_channel_from_trace(trace_of({10}), 0.0, 0.0), std::invalid_argument);
    DelayTrace back;
    back.samples = {{3, 10.0}, {2, 10.0}};
    CHECK_THROWS_AS(fit_channel_from_trace(back, 20.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("sampled trace refits to the original chain") {
    CHECK(oracle::channel_roundtrip_error(100'000, 5) <= 0.02);
  }

  TEST_CASE("fitted chain is row-stochastic and reproduces bin transitions") {
    Rng rng(21);
    const auto truth = synthetic_leo_channel(0.05);
    check_row_stochastic(truth.chain);
    const auto fitted = fit_channel_from_trace(sample_delay_trace(truth, 4, 20'000, rng), 20.0, 0.05);
    check_row_stochastic(fitted.chain);
    for (std::size_t i = 0; i < fitted.n_states(); ++i)
      CHECK(fitted.states[i].round_trip() == doctest::Approx(truth.states[i].round_trip()));
  }

  TEST_CASE("trace CSV round trip and parse errors") {
    const DelayTrace t = trace_of({50.5, 75.25, 120});
    std::stringstream buf;
    write_delay_trace_csv(buf, t);
    const DelayTrace back = read_delay_trace_csv(buf);
    REQUIRE(back.samples.size() == 3);
    CHECK(back.samples[1].round_trip_ms == 75.25);
    CHECK(back.samples[2].step == 2);

    std::istringstream bad_header("time,delay\n0,1\n");
    CHECK_THROWS_AS(read_delay_trace_csv(bad_header), ConfigError);
    std::istringstream bad_row("step,delay_ms\n0,abc\n");
    CHECK_THROWS_AS(read_delay_trace_csv(bad_row), ConfigError);
    CHECK_THROWS_AS(read_delay_trace_csv(std::filesystem::path("/nonexistent/trace.csv")), IoError);
  }

  TEST_CASE("chain JSON round trip") {
    const auto m = synthetic_leo_channel(0.2);
    const auto back = channel_from_json(channel_to_json(m));
    CHECK(back.chain.transitions() == m.chain.transitions());
    for (std::size_t i = 0; i < m.n_states(); ++i) {
      CHECK(back.states[i].round_trip() == doctest::Approx(m.states[i].round_trip()));
      CHECK(back.states[i].data_erasure == 0.2);
    }
    CHECK_THROWS_AS(channel_from_json(nlohmann::json{{"states", 1}}), ConfigError);
  }

  TEST_CASE("erasure override") {
    const auto m = with_erasure(synthetic_leo_channel(0.0), 0.75, 0.1);
    for (const auto& s : m.states) {
      CHECK(s.data_erasure == 0.75);
      CHECK(s.feedback_erasure == 0.1);
    }
    CHECK_THROWS_AS(with_erasure(m, 1.5, 0.0), std::invalid_argument);
  }
}
