#include "sleepsched/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "sleepsched/errors.hpp"

#ifndef SLEEPSCHED_VERSION
#define SLEEPSCHED_VERSION "unknown"
#endif

namespace sleepsched {

namespace {

std::size_t strategy_index(const std::string& id) {
  const auto& ids = strategy_ids();
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw ConfigError("unknown strategy '" + id + "'");
  return static_cast<std::size_t>(it - ids.begin());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

SweepSpec SweepSpec::from_config(const ExperimentConfig& config) {
  if (!config.sweep) throw ConfigError("sweep: section missing from config");
  return SweepSpec{config, *config.sweep};
}

RngSeed cell_seed(std::uint64_t master, std::size_t value_index, std::size_t strategy_index,
                  int repetition) {
  return RngSeed{derive_seed(master, {value_index, strategy_index,
                                      static_cast<std::uint64_t>(repetition)}),
                 0};
}

ExperimentConfig apply_parameter(const ExperimentConfig& base, SweepParameter p, double value) {
  ExperimentConfig c = base;
  switch (p) {
    case SweepParameter::kDataErasure: c.channel.data_erasure = value; break;
    case SweepParameter::kEnergyWeight: c.weights.w_energy = value; break;
    case SweepParameter::kStateChangeRate:
      if (c.process.kind != "adjacent")
        throw ConfigError("state_change_rate sweeps need an adjacent process");
      c.process.p_change = value;
      break;
  }
  return c;
}

ResultRow run_cell(const SweepSpec& spec, std::size_t value_index, const std::string& strategy,
                   int repetition) {
  const double value = spec.grid.values.at(value_index);
  ExperimentConfig cfg = apply_parameter(spec.base, spec.grid.parameter, value);
  cfg.strategy.id = strategy;
  const RngSeed seed = cell_seed(spec.base.seed, value_index, strategy_index(strategy), repetition);
  const CostLedger ledger = run_episode(build_sim_config(cfg, seed, repetition), false);
  return ResultRow{value, strategy, repetition, ledger.c_e(), ledger.c_qual(), ledger.c_avg()};
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, unsigned jobs, const ProgressFn& progress) {
  const auto& g = spec.grid;
  if (g.values.empty() || g.strategies.empty() || g.repetitions < 1)
    throw ConfigError("sweep: values and strategies must be non-empty, repetitions >= 1");
  for (const auto& s : g.strategies) strategy_index(s);

  const std::size_t n_s = g.strategies.size();
  const std::size_t n_r = static_cast<std::size_t>(g.repetitions);
  const std::size_t total = g.values.size() * n_s * n_r;
  std::vector<ResultRow> rows(total);

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        const std::size_t vi = i / (n_s * n_r);
        const std::size_t si = (i / n_r) % n_s;
        const int rep = static_cast<int>(i % n_r);
        rows[i] = run_cell(spec, vi, g.strategies[si], rep);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(mu);
        progress(d, total);
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double pos = q * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (pos - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<double> costs;
    while (j < rows.size() && rows[j].parameter_value == rows[i].parameter_value &&
           rows[j].strategy == rows[i].strategy)
      costs.push_back(rows[j++].c_avg);
    double sum = 0.0;
    for (double c : costs) sum += c;
    out.push_back(SummaryRow{rows[i].parameter_value, rows[i].strategy,
                             sum / static_cast<double>(costs.size()), quantile(costs, 0.25),
                             quantile(costs, 0.75)});
    i = j;
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "parameter_value,strategy,repetition,c_e,c_qual,c_avg\n";
  for (const auto& r : rows)
    out << fmt(r.parameter_value) << ',' << r.strategy << ',' << r.repetition << ',' << fmt(r.c_e)
        << ',' << fmt(r.c_qual) << ',' << fmt(r.c_avg) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "value,strategy,mean,q25,q75\n";
  for (const auto& r : rows)
    out << fmt(r.value) << ',' << r.strategy << ',' << fmt(r.mean) << ',' << fmt(r.q25) << ','
        << fmt(r.q75) << '\n';
}

nlohmann::json sweep_meta(const SweepSpec& spec, unsigned jobs) {
  const int n = spec.grid.repetitions;
  return {{"tool", "sleepsched"},
          {"version", SLEEPSCHED_VERSION},
          {"master_seed", spec.base.seed},
          {"parameter", std::string(to_string(spec.grid.parameter))},
          {"values", spec.grid.values},
          {"strategies", spec.grid.strategies},
          {"repetitions", n},
          {"preset", n < 100 ? "desk" : "full"},
          {"jobs", jobs},
          {"seed_rule", "derive_seed(master_seed, value_index, strategy_index, repetition)"},
          {"config", config_to_json(spec.base)}};
}

void write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec, unsigned jobs,
                         const std::vector<ResultRow>& rows) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    return f;
  };
  {
    auto f = open(dir / "results.csv");
    write_results_csv(f, rows);
  }
  {
    auto f = open(dir / "summary.csv");
    write_summary_csv(f, summarize(rows));
  }
  {
    auto f = open(dir / "meta.json");
    f << sweep_meta(spec, jobs).dump(2) << '\n';
  }
}

}  // namespace sleepsched
