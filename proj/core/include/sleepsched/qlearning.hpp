#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sleepsched/strategy.hpp"

namespace sleepsched {

/// Dense tabular action values; unseen entries read as 0.
class QTable {
 public:
  QTable(std::size_t n_states, std::size_t n_actions, double learning_rate, double discount,
         double exploration_rate);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double value(std::size_t s, std::size_t a) const { return q_[s * n_actions_ + a]; }
  double& value(std::size_t s, std::size_t a) { return q_[s * n_actions_ + a]; }

  double learning_rate() const { return alpha_; }
  double discount() const { return gamma_; }
  double exploration_rate() const { return epsilon_; }
  void set_exploration_rate(double epsilon);

  /// Lowest-index action among the minimal values.
  std::size_t greedy(std::size_t s) const;
  double min_value(std::size_t s) const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  double alpha_;
  double gamma_;
  double epsilon_;
  std::vector<double> q_;
};

/// One decision interval: `cost` is the discounted cost accumulated over
/// `duration` steps.
struct Transition {
  std::size_t state;
  std::size_t action;
  double cost;
  int duration = 1;
};

/// Applies Q(s,a) <- (1-α)Q(s,a) + α(cost + γ^duration min_a' Q(s',a')) for
/// `previous` when given, then picks an ε-greedy action index for
/// `next_state`. With duration 1 this is the ordinary one-step update.
std::size_t qlearn_decide_and_update(QTable& table, const std::optional<Transition>& previous,
                                     std::size_t next_state, Rng& rng);

/// Tabular learner over (X^Tx, believed X^Rx, AoI^Tx, believed AoI^Rx,
/// believed AoII) with bucketed ages and a coarse sleep action set. Sleep
/// actions span several steps, so each decision interval is treated as one
/// semi-Markov transition: step costs are discounted within the interval
/// and the bootstrap is discounted by gamma^steps.
class QLearningStrategy final : public Strategy {
 public:
  QLearningStrategy(QLearningParams params, std::size_t n_process_states, int cap, Step horizon);

  std::string_view id() const override { return "qlearn"; }
  Action decide(const DecisionContext& ctx, Rng& rng) override;
  void on_step_cost(double cost) override;

  const QTable& table() const { return table_; }
  std::size_t bucket(int age) const;
  std::size_t encode(StateIndex x_tx, StateIndex x_rx, int aoi_tx, int aoi_rx, int aoii) const;

 private:
  QLearningParams params_;
  std::size_t n_x_;
  int cap_;
  Step horizon_;
  std::size_t n_buckets_;
  QTable table_;

  std::optional<std::size_t> last_state_;
  std::size_t last_action_ = 0;
  double cost_sum_ = 0.0;
  double cost_discount_ = 1.0;
  int cost_steps_ = 0;

  // Device-side AoII estimate: steps since the buffer last matched the
  // believed receiver value at an awake step.
  int aoii_est_ = 0;
  Step last_decision_t_ = -1;
};

}  // namespace sleepsched
