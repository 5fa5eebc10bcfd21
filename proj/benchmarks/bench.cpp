#include <benchmark/benchmark.h>

#include <optional>

#include "sleepsched/config.hpp"
#include "sleepsched/got.hpp"
#include "sleepsched/psbo.hpp"
#include "sleepsched/simulator.hpp"

using namespace sleepsched;

namespace {

// Belief after a quiet stretch, then one sleep step so the tensor has spread.
Belief warmed_belief(int cap) {
  Belief b = initial_belief(8, cap, MetricKind::kAoii, 4);
  for (Step t = 0; t < 500; ++t) b = belief_update(b, t, StateIndex{4}, std::nullopt);
  b.n_sleep = 20;
  return b;
}

GoTensor default_got(int cap) {
  const ProcessSpace space = temperature_space();
  return make_got_a(space, states_below(space, 0.0), 1.0, 0.001, cap);
}

void BM_TensorUpdate(benchmark::State& state) {
  const int cap = static_cast<int>(state.range(0));
  Belief b = warmed_belief(cap);
  const RowMatrix p = normalized_proc_est(b);
  for (int i = 0; i < 10; ++i) b = propagate(b, p);
  std::vector<double> next(8, 0.0);
  for (StateIndex i = 0; i < 8; ++i)
    for (StateIndex j = 0; j < 8; ++j) next[j] += b.d_x[i] * p(i, j);
  const std::vector<StateIndex> rx{b.x_rx};
  Tensor3 out;
  for (auto _ : state) {
    tensor_update_into(out, b.t_aoii, b.d_x, next, p, rx);
    benchmark::DoNotOptimize(out.raw().data());
  }
}
BENCHMARK(BM_TensorUpdate)->Arg(16)->Arg(64)->Arg(256);

void BM_PredictCost(benchmark::State& state) {
  const int cap = static_cast<int>(state.range(0));
  Belief b = warmed_belief(cap);
  const RowMatrix p = normalized_proc_est(b);
  for (int i = 0; i < 10; ++i) b = propagate(b, p);
  const GoTensor got = default_got(cap);
  for (auto _ : state) benchmark::DoNotOptimize(predict_cost(b, got));
}
BENCHMARK(BM_PredictCost)->Arg(16)->Arg(64)->Arg(256);

void BM_PsboDecide(benchmark::State& state) {
  const Belief b = warmed_belief(64);
  const GoTensor got = default_got(64);
  PsboParams params;
  params.max_sleep = static_cast<int>(state.range(0));
  const LinkEstimator link;
  int last = 0;
  for (auto _ : state) {
    last = psbo_decide(b, link, got, CostWeights{}, EnergyProfile{}, params);
    benchmark::DoNotOptimize(last);
  }
  state.counters["sleep"] = last;
}
BENCHMARK(BM_PsboDecide)->Arg(30)->Arg(300);

void BM_Episode(benchmark::State& state, const char* strategy) {
  ExperimentConfig cfg;
  cfg.t_final = 10'000;
  cfg.strategy.id = strategy;
  const SimConfig sim = build_sim_config(cfg, RngSeed{1, 0});
  for (auto _ : state) {
    const CostLedger l = run_episode(sim, false);
    benchmark::DoNotOptimize(l.c_avg());
  }
  state.SetItemsProcessed(state.iterations() * cfg.t_final);
}
BENCHMARK_CAPTURE(BM_Episode, psbo, "psbo")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, always, "always")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, qlearn, "qlearn")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, never, "never")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
