#pragma once

#include "sleepsched/strategy.hpp"

namespace sleepsched {

/// Sleep threshold that minimizes the pure-AoI cost:
/// floor(sqrt(2 w_e (T_s P_s + T_w P_w + T_tx P_a) / w_qual)) + 1.
/// Throws std::invalid_argument when w_qual is zero.
int threshold_theta(const CostWeights& weights, const EnergyProfile& profile);

/// One awake step, then a uniform sleep in [lo, hi].
class RandomStrategy final : public Strategy {
 public:
  RandomStrategy(int lo, int hi);
  std::string_view id() const override { return "random"; }
  Action decide(const DecisionContext& ctx, Rng& rng) override;

 private:
  int lo_;
  int hi_;
};

/// Never sleeps.
class AlwaysTransmitStrategy final : public Strategy {
 public:
  explicit AlwaysTransmitStrategy(bool force_transmit = true) : force_(force_transmit) {}
  std::string_view id() const override { return "always"; }
  Action decide(const DecisionContext&, Rng&) override { return {0}; }
  bool forces_transmission() const override { return force_; }

 private:
  bool force_;
};

/// Sleeps for the whole run.
class NeverTransmitStrategy final : public Strategy {
 public:
  explicit NeverTransmitStrategy(int max_sleep);
  std::string_view id() const override { return "never"; }
  Action initial_action() const override { return {max_sleep_}; }
  Action decide(const DecisionContext&, Rng&) override { return {max_sleep_}; }
  bool rearm_on_expiry() const override { return true; }

 private:
  int max_sleep_;
};

/// Sleeps theta - 1 steps after an acknowledged transmission, otherwise
/// stays awake and retries.
class ThresholdStrategy final : public Strategy {
 public:
  ThresholdStrategy(int theta, bool force_transmit = true);
  std::string_view id() const override { return "threshold"; }
  Action decide(const DecisionContext& ctx, Rng& rng) override;
  bool forces_transmission() const override { return force_; }
  int theta() const { return theta_; }

 private:
  int theta_;
  bool force_;
};

}  // namespace sleepsched
