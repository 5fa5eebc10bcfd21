#include "sleepsched/qlearning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sleepsched {

QTable::QTable(std::size_t n_states, std::size_t n_actions, double learning_rate,
               double discount, double exploration_rate)
    : n_states_(n_states),
      n_actions_(n_actions),
      alpha_(learning_rate),
      gamma_(discount),
      epsilon_(0.0),
      q_(n_states * n_actions, 0.0) {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument("Q-table must be non-empty");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw std::invalid_argument("learning rate must lie in (0, 1]");
  if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
  set_exploration_rate(exploration_rate);
}

void QTable::set_exploration_rate(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("exploration rate must lie in [0, 1]");
  epsilon_ = epsilon;
}

std::size_t QTable::greedy(std::size_t s) const {
  const double* row = q_.data() + s * n_actions_;
  return static_cast<std::size_t>(std::min_element(row, row + n_actions_) - row);
}

double QTable::min_value(std::size_t s) const { return value(s, greedy(s)); }

std::size_t qlearn_decide_and_update(QTable& table, const std::optional<Transition>& previous,
                                     std::size_t next_state, Rng& rng) {
  if (next_state >= table.n_states()) throw std::invalid_argument("Q-learning state out of range");
  if (previous) {
    if (previous->state >= table.n_states() || previous->action >= table.n_actions())
      throw std::invalid_argument("Q-learning transition out of range");
    double& q = table.value(previous->state, previous->action);
    if (previous->duration < 1) throw std::invalid_argument("transition duration must be >= 1");
    const double target = previous->cost + std::pow(table.discount(), previous->duration) *
                                               table.min_value(next_state);
    q = (1.0 - table.learning_rate()) * q + table.learning_rate() * target;
  }
  if (table.exploration_rate() > 0.0 && bernoulli(rng, table.exploration_rate()))
    return static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<std::int64_t>(table.n_actions()) - 1));
  return table.greedy(next_state);
}

namespace {

std::size_t bucket_count(const QLearningParams& p) { return p.age_buckets.size() + 1; }

}  // namespace

QLearningStrategy::QLearningStrategy(QLearningParams params, std::size_t n_process_states, int cap,
                                     Step horizon)
    : params_(std::move(params)),
      n_x_(n_process_states),
      cap_(cap),
      horizon_(horizon),
      n_buckets_(bucket_count(params_)),
      table_(n_x_ * n_x_ * n_buckets_ * n_buckets_ * n_buckets_, params_.actions.size(),
             params_.learning_rate, params_.discount, params_.epsilon_start) {
  if (params_.actions.empty()) throw std::invalid_argument("Q-learning needs at least one action");
  if (params_.age_buckets.empty() || params_.age_buckets.front() != 0 ||
      !std::is_sorted(params_.age_buckets.begin(), params_.age_buckets.end()))
    throw std::invalid_argument("age buckets must be ascending and start at 0");
  if (params_.age_buckets.back() >= cap)
    throw std::invalid_argument("age bucket edges must lie below the cap");
  for (int a : params_.actions)
    if (a < 0) throw std::invalid_argument("Q-learning actions must be nonnegative");
  if (!(params_.decay_fraction > 0.0)) throw std::invalid_argument("decay fraction must be > 0");
}

std::size_t QLearningStrategy::bucket(int age) const {
  if (age >= cap_) return n_buckets_ - 1;
  const auto& b = params_.age_buckets;
  return static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), age) - b.begin()) - 1;
}

std::size_t QLearningStrategy::encode(StateIndex x_tx, StateIndex x_rx, int aoi_tx, int aoi_rx,
                                      int aoii) const {
  std::size_t s = x_tx;
  s = s * n_x_ + x_rx;
  s = s * n_buckets_ + bucket(aoi_tx);
  s = s * n_buckets_ + bucket(aoi_rx);
  s = s * n_buckets_ + bucket(aoii);
  return s;
}

void QLearningStrategy::on_step_cost(double cost) {
  cost_sum_ += cost_discount_ * cost;
  cost_discount_ *= params_.discount;
  ++cost_steps_;
}

Action QLearningStrategy::decide(const DecisionContext& ctx, Rng& rng) {
  const Belief& b = ctx.belief;
  const Step elapsed = last_decision_t_ < 0 ? 1 : ctx.t - last_decision_t_;
  if (b.x_tx == b.x_rx)
    aoii_est_ = 0;
  else
    aoii_est_ = static_cast<int>(std::min<Step>(aoii_est_ + elapsed, cap_));
  last_decision_t_ = ctx.t;

  // The buffer was just refreshed, so AoI^Tx is 0 at every decision point.
  const std::size_t s = encode(b.x_tx, b.x_rx, 0, b.aoi_rx, aoii_est_);

  const double progress =
      static_cast<double>(ctx.t) / (params_.decay_fraction * static_cast<double>(horizon_));
  const double eps = params_.epsilon_start +
                     (params_.epsilon_end - params_.epsilon_start) * std::min(progress, 1.0);
  table_.set_exploration_rate(std::clamp(eps, 0.0, 1.0));

  std::optional<Transition> prev;
  if (last_state_ && cost_steps_ > 0)
    prev = Transition{*last_state_, last_action_, cost_sum_, cost_steps_};
  const std::size_t a = qlearn_decide_and_update(table_, prev, s, rng);

  last_state_ = s;
  last_action_ = a;
  cost_sum_ = 0.0;
  cost_discount_ = 1.0;
  cost_steps_ = 0;
  return {params_.actions[a]};
}

}  // namespace sleepsched
