#pragma once

// Ground-truth environment. Each step the process and channel chains advance
// (from t = 1 on), the device either sleeps or runs its wake/sense/transmit
// phases, receiver ages are updated from ground truth, and costs are charged.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sleepsched/belief.hpp"
#include "sleepsched/channel.hpp"
#include "sleepsched/link_estimator.hpp"
#include "sleepsched/markov.hpp"
#include "sleepsched/model.hpp"
#include "sleepsched/rng.hpp"
#include "sleepsched/strategy.hpp"

namespace sleepsched {

struct SimConfig {
  ProcessModel process;
  ChannelModel channel;
  GoTensor got;
  EnergyProfile profile;
  CostWeights weights;
  Step t_final = 86'400;
  StrategySpec strategy;
  RngSeed seed;
  /// Laplace pseudo-count for the device's transition estimate.
  double count_prior = 1.0;

  MetricKind metric() const { return got.metric; }
  /// Throws std::invalid_argument on inconsistent dimensions or values.
  void validate() const;
};

struct StepRecord {
  Step step = 0;
  double energy_j = 0.0;
  double quality_cost = 0.0;
  double total_cost = 0.0;
  bool slept = false;
  bool transmitted = false;
  bool acked = false;
  int aoi_rx = 0;
  int aoii = 0;
  PhaseTimes phases;
};

/// Per-step records (optional) and running sums.
class CostLedger {
 public:
  explicit CostLedger(bool keep_records = true) : keep_(keep_records) {}

  void append(const StepRecord& r);

  const std::vector<StepRecord>& records() const { return records_; }
  Step steps() const { return steps_; }
  double sum_energy() const { return sum_e_; }
  double sum_quality() const { return sum_q_; }
  double sum_total() const { return sum_total_; }
  /// Mean energy per step (J), mean data-quality cost, mean weighted total.
  double c_e() const;
  double c_qual() const;
  double c_avg() const;

 private:
  bool keep_;
  std::vector<StepRecord> records_;
  Step steps_ = 0;
  double sum_e_ = 0.0;
  double sum_q_ = 0.0;
  double sum_total_ = 0.0;
};

struct SystemState {
  StateIndex channel = 0;
  StateIndex x = 0;
  StateIndex x_tx = 0;
  StateIndex x_rx = 0;
  AgeValue aoi_tx;
  AgeValue aoi_rx;
  AgeValue aoii;
  Belief belief;
  int sleep_remaining = 0;
  bool prev_asleep = false;
};

class Simulator {
 public:
  explicit Simulator(SimConfig config, bool keep_records = true);

  /// Executes step t = steps_done() and returns its record.
  StepRecord step();
  void run();

  bool done() const { return t_ >= config_.t_final; }
  Step steps_done() const { return t_; }
  const SystemState& state() const { return state_; }
  const CostLedger& ledger() const { return ledger_; }
  const LinkEstimator& link() const { return link_; }
  const Strategy& strategy() const { return *strategy_; }
  const SimConfig& config() const { return config_; }

 private:
  SimConfig config_;
  std::unique_ptr<Strategy> strategy_;
  Rng env_rng_;
  Rng strategy_rng_;
  SystemState state_;
  LinkEstimator link_;
  CostLedger ledger_;
  double t_listen_ = 0.0;
  Step t_ = 0;
};

CostLedger run_episode(const SimConfig& config, bool keep_records = true);

void write_ledger_csv(std::ostream& out, const CostLedger& ledger);
void write_ledger_csv(const std::filesystem::path& path, const CostLedger& ledger);
/// {c_e, c_qual, c_avg, steps, seed}
nlohmann::json summary_json(const CostLedger& ledger, const RngSeed& seed);

}  // namespace sleepsched
