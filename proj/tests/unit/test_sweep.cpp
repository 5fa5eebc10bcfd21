#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scratch.hpp"
#include "sleepsched/sweep.hpp"

using namespace sleepsched;

namespace {

SweepSpec small_spec(std::vector<std::string> strategies, int reps, Step t_final = 600) {
  ExperimentConfig base;
  base.seed = 7;
  base.t_final = t_final;
  SweepConfig grid;
  grid.parameter = SweepParameter::kDataErasure;
  grid.values = {0.0, 0.5};
  grid.strategies = std::move(strategies);
  grid.repetitions = reps;
  return SweepSpec{base, grid};
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_results_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("linear-interpolation quantiles") {
    CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
    CHECK(quantile({4, 3, 2, 1}, 0.75) == doctest::Approx(3.25));
    CHECK(quantile({5}, 0.25) == 5.0);
    CHECK(quantile({1, 9}, 0.5) == 5.0);
    CHECK(quantile({1, 9}, 0.0) == 1.0);
    CHECK(quantile({1, 9}, 1.0) == 9.0);
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  }

  TEST_CASE("single never-transmit cell costs the sleep floor") {
    // A static process keeps the receiver in sync, so only the floor remains.
    SweepSpec spec = small_spec({"never"}, 1, 500);
    spec.base.process.p_change = 0.0;
    spec.grid.values = {0.3};
    const auto rows = run_sweep(spec, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].c_avg == doctest::Approx(0.00487).epsilon(1e-12));
    const auto summary = summarize(rows);
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].q25 == summary[0].q75);
  }

  TEST_CASE("rows are ordered and parallel runs equal serial runs") {
    const SweepSpec spec = small_spec({"random", "always", "psbo"}, 3);
    const auto serial = run_sweep(spec, 1);
    const auto parallel = run_sweep(spec, 4);
    REQUIRE(serial.size() == 2 * 3 * 3);
    CHECK(csv(serial) == csv(parallel));
    CHECK(serial[0].strategy == "random");
    CHECK(serial[3].strategy == "always");
    CHECK(serial[9].parameter_value == 0.5);
    CHECK(serial[10].repetition == 1);
  }

  TEST_CASE("cells are reproducible in isolation") {
    const SweepSpec spec = small_spec({"random", "qlearn"}, 2);
    const auto rows = run_sweep(spec, 2);
    const ResultRow again = run_cell(spec, 1, "qlearn", 1);
    CHECK(again.c_avg == rows.back().c_avg);
    // A cell keeps its seed when other strategies join the grid.
    const SweepSpec wider = small_spec({"psbo", "random", "always", "qlearn"}, 2);
    CHECK(run_cell(wider, 1, "qlearn", 1).c_avg == again.c_avg);
    CHECK(cell_seed(1, 0, 0, 0).master_seed != cell_seed(1, 0, 0, 1).master_seed);
  }

  TEST_CASE("summary quantiles are ordered") {
    const auto rows = run_sweep(small_spec({"random", "threshold"}, 4), 2);
    for (const auto& s : summarize(rows)) {
      CHECK(s.q25 <= s.q75);
      CHECK(s.q25 <= s.mean + 1e-12);
    }
  }

  TEST_CASE("swept parameters land in the config") {
    ExperimentConfig base;
    CHECK(apply_parameter(base, SweepParameter::kDataErasure, 0.75).channel.data_erasure == 0.75);
    CHECK(apply_parameter(base, SweepParameter::kEnergyWeight, 8).weights.w_energy == 8);
    CHECK(apply_parameter(base, SweepParameter::kStateChangeRate, 0.25).process.p_change == 0.25);
    base.process.kind = "matrix";
    CHECK_THROWS(apply_parameter(base, SweepParameter::kStateChangeRate, 0.25));
  }

  TEST_CASE("output files are deterministic") {
    const SweepSpec spec = small_spec({"random", "never"}, 2, 300);
    ScratchDir a("sweep-a");
    ScratchDir b("sweep-b");
    write_sweep_outputs(a.path(), spec, 1, run_sweep(spec, 1));
    write_sweep_outputs(b.path(), spec, 3, run_sweep(spec, 3));
    for (const char* f : {"results.csv", "summary.csv"})
      CHECK(ScratchDir::read(a.path() / f) == ScratchDir::read(b.path() / f));
    const auto meta = nlohmann::json::parse(ScratchDir::read(a.path() / "meta.json"));
    CHECK(meta.at("master_seed") == 7);
    CHECK(meta.at("preset") == "desk");
    const std::string summary = ScratchDir::read(a.path() / "summary.csv");
    CHECK(summary.rfind("value,strategy,mean,q25,q75\n", 0) == 0);
  }
}
