#pragma once

// Experiment configuration: a JSON document with a fixed key set. Unknown
// keys and wrongly typed values raise ConfigError naming the key path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sleepsched/simulator.hpp"

namespace sleepsched {

struct ProcessConfig {
  std::string kind = "adjacent";  // adjacent | matrix
  std::size_t n_states = 8;
  double p_change = 0.01;
  std::vector<double> labels;  // empty: temperature bins when n_states == 8
  std::vector<std::vector<double>> transitions;  // kind == matrix
};

struct ChannelConfig {
  std::string kind = "synthetic";  // synthetic | trace | chain
  std::filesystem::path path;      // trace CSV or chain JSON
  double bin_ms = 20.0;
  double data_erasure = 0.01;
  double feedback_erasure = 0.0;
};

struct GotConfig {
  std::string kind = "a";  // a | b | file
  MetricKind metric = MetricKind::kAoii;  // ignored for kind == file
  double critical_below = 0.0;  // GoT-A: labels strictly below are critical
  double alpha = 1.0;
  double beta = 0.001;
  /// GoT-B variabilities; repetition r uses entry r mod size.
  std::vector<double> variabilities{0.1, 0.2, 0.3};
  std::filesystem::path path;  // kind == file
};

enum class SweepParameter { kDataErasure, kEnergyWeight, kStateChangeRate };

std::string_view to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(std::string_view name);

struct SweepConfig {
  SweepParameter parameter = SweepParameter::kDataErasure;
  std::vector<double> values;
  std::vector<std::string> strategies;
  int repetitions = 10;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  Step t_final = 86'400;
  int cap = 64;
  double count_prior = 1.0;
  ProcessConfig process;
  ChannelConfig channel;
  GotConfig got;
  EnergyProfile energy;
  CostWeights weights;
  StrategySpec strategy;
  std::optional<SweepConfig> sweep;
};

/// Default grid for each sweep parameter.
std::vector<double> default_sweep_values(SweepParameter p);

ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
/// Reads and parses a file; IoError if it cannot be read, ConfigError if it
/// is malformed. Relative paths inside resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

ProcessModel build_process(const ProcessConfig& cfg);
ChannelModel build_channel(const ChannelConfig& cfg);
/// `repetition` selects the GoT-B variability; `master_seed` seeds its draws.
GoTensor build_got(const GotConfig& cfg, const ProcessModel& process, int cap,
                   std::uint64_t master_seed, int repetition = 0);

/// Full simulator configuration for one episode. Throws ConfigError when
/// the pieces are inconsistent.
SimConfig build_sim_config(const ExperimentConfig& cfg, const RngSeed& seed, int repetition = 0);

}  // namespace sleepsched
