#include "sleepsched/strategy.hpp"

#include <stdexcept>

#include "sleepsched/baselines.hpp"
#include "sleepsched/qlearning.hpp"

namespace sleepsched {

const std::vector<std::string>& strategy_ids() {
  static const std::vector<std::string> ids{"psbo",   "random",    "always",
                                            "never",  "threshold", "qlearn"};
  return ids;
}

PsboStrategy::PsboStrategy(PsboParams params, const StrategyEnv& env)
    : params_(params), env_(env) {
  if (env_.got == nullptr) throw std::invalid_argument("PSBO needs a GoT tensor");
  if (params_.max_sleep < 1 || params_.max_tx_steps < 1)
    throw std::invalid_argument("PSBO needs max_sleep >= 1 and max_tx_steps >= 1");
}

Action PsboStrategy::decide(const DecisionContext& ctx, Rng&) {
  return {psbo_decide(ctx.belief, ctx.link, *env_.got, env_.weights, env_.profile, params_)};
}

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, const StrategyEnv& env) {
  if (spec.id == "psbo") return std::make_unique<PsboStrategy>(spec.psbo, env);
  if (spec.id == "random") return std::make_unique<RandomStrategy>(spec.random_min, spec.random_max);
  if (spec.id == "always") return std::make_unique<AlwaysTransmitStrategy>(spec.force_transmit);
  if (spec.id == "never") return std::make_unique<NeverTransmitStrategy>(spec.max_sleep());
  if (spec.id == "threshold")
    return std::make_unique<ThresholdStrategy>(threshold_theta(env.weights, env.profile),
                                               spec.force_transmit);
  if (spec.id == "qlearn") {
    if (env.got == nullptr) throw std::invalid_argument("Q-learning needs a GoT tensor");
    return std::make_unique<QLearningStrategy>(spec.qlearn, env.got->n_states(), env.got->cap(),
                                               env.horizon);
  }
  throw std::invalid_argument("unknown strategy id '" + spec.id + "'");
}

}  // namespace sleepsched
