#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sleepsched/config.hpp"

namespace sleepsched {

struct SweepSpec {
  ExperimentConfig base;
  SweepConfig grid;

  /// Uses `config.sweep`; ConfigError when it is absent.
  static SweepSpec from_config(const ExperimentConfig& config);
};

struct ResultRow {
  double parameter_value = 0.0;
  std::string strategy;
  int repetition = 0;
  double c_e = 0.0;
  double c_qual = 0.0;
  double c_avg = 0.0;
};

struct SummaryRow {
  double value = 0.0;
  std::string strategy;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Episode seed for one grid cell. The strategy index is its position in
/// strategy_ids(), so adding strategies to a grid leaves other rows intact.
RngSeed cell_seed(std::uint64_t master, std::size_t value_index, std::size_t strategy_index,
                  int repetition);

/// Base config with the swept parameter set to `value`.
ExperimentConfig apply_parameter(const ExperimentConfig& base, SweepParameter p, double value);

/// Runs one grid cell.
ResultRow run_cell(const SweepSpec& spec, std::size_t value_index, const std::string& strategy,
                   int repetition);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Every (value, strategy, repetition) cell on a pool of `jobs` workers
/// (0 = hardware concurrency). Rows come back ordered by value, then strategy
/// as listed in the grid, then repetition, independent of `jobs`.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, unsigned jobs = 0,
                                 const ProgressFn& progress = {});

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> sample, double q);

/// Per-(value, strategy) mean and interquartile bounds of c_avg, in row order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
nlohmann::json sweep_meta(const SweepSpec& spec, unsigned jobs);

/// Writes results.csv, summary.csv and meta.json into `dir` (created).
void write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec, unsigned jobs,
                         const std::vector<ResultRow>& rows);

}  // namespace sleepsched
