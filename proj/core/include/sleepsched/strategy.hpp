#pragma once

// Strategy contract. The simulator consults a strategy at the end of every
// awake step; the returned action is the number of deep-sleep steps that
// follow (0 keeps the device awake).

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sleepsched/belief.hpp"
#include "sleepsched/link_estimator.hpp"
#include "sleepsched/model.hpp"
#include "sleepsched/psbo.hpp"
#include "sleepsched/rng.hpp"

namespace sleepsched {

struct QLearningParams {
  double learning_rate = 0.1;
  double discount = 0.99;
  double epsilon_start = 0.5;
  double epsilon_end = 0.01;
  /// Fraction of the horizon over which epsilon decays linearly.
  double decay_fraction = 0.5;
  std::vector<int> actions{0, 1, 2, 5, 10, 30, 60, 120, 300};
  /// Lower edges of the age buckets; the cap is appended as the last bucket.
  std::vector<int> age_buckets{0, 1, 2, 3, 5, 10, 20};
};

/// Strategy id plus every hyperparameter a strategy may read.
struct StrategySpec {
  std::string id = "psbo";
  PsboParams psbo;
  int random_min = 30;
  int random_max = 300;
  /// AlwaysTransmit/Threshold send every awake step when true; when false
  /// the AoII gate applies to them as to the other strategies.
  bool force_transmit = true;
  QLearningParams qlearn;

  int max_sleep() const { return psbo.max_sleep; }
};

/// Immutable inputs a strategy may use besides the per-step context.
struct StrategyEnv {
  const GoTensor* got = nullptr;
  CostWeights weights;
  EnergyProfile profile;
  Step horizon = 86'400;
};

/// Device-visible information at the end of an awake step.
struct DecisionContext {
  Step t = 0;
  const Belief& belief;
  const LinkEstimator& link;
  bool transmitted = false;
  bool acked = false;
};

class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual std::string_view id() const = 0;
  /// Action in force before the first step.
  virtual Action initial_action() const { return {0}; }
  virtual Action decide(const DecisionContext& ctx, Rng& rng) = 0;
  /// Weighted total cost of every simulated step, in order.
  virtual void on_step_cost(double /*cost*/) {}
  /// When true the sleep timer restarts on expiry and the device never wakes.
  virtual bool rearm_on_expiry() const { return false; }
  /// When true the device transmits on every awake step regardless of the
  /// metric's transmission gate.
  virtual bool forces_transmission() const { return false; }
};

const std::vector<std::string>& strategy_ids();

/// Throws std::invalid_argument for an unknown id.
std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, const StrategyEnv& env);

class PsboStrategy final : public Strategy {
 public:
  PsboStrategy(PsboParams params, const StrategyEnv& env);

  std::string_view id() const override { return "psbo"; }
  Action decide(const DecisionContext& ctx, Rng& rng) override;

 private:
  PsboParams params_;
  StrategyEnv env_;
};

}  // namespace sleepsched
