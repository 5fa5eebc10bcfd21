#include "sleepsched/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace sleepsched {

int threshold_theta(const CostWeights& weights, const EnergyProfile& profile) {
  if (!(weights.w_quality > 0.0)) throw std::invalid_argument("threshold needs w_qual > 0");
  const double per_update = profile.t_sense * profile.p_sense + profile.t_wake * profile.p_wake +
                            profile.t_tx * profile.p_antenna;
  return static_cast<int>(std::floor(std::sqrt(2.0 * weights.w_energy * per_update /
                                               weights.w_quality))) + 1;
}

RandomStrategy::RandomStrategy(int lo, int hi) : lo_(lo), hi_(hi) {
  if (lo < 0 || hi < lo) throw std::invalid_argument("random sleep range must satisfy 0 <= lo <= hi");
}

Action RandomStrategy::decide(const DecisionContext&, Rng& rng) {
  return {static_cast<int>(uniform_int(rng, lo_, hi_))};
}

NeverTransmitStrategy::NeverTransmitStrategy(int max_sleep) : max_sleep_(max_sleep) {
  if (max_sleep < 1) throw std::invalid_argument("max_sleep must be >= 1");
}

ThresholdStrategy::ThresholdStrategy(int theta, bool force_transmit)
    : theta_(theta), force_(force_transmit) {
  if (theta < 1) throw std::invalid_argument("threshold theta must be >= 1");
}

Action ThresholdStrategy::decide(const DecisionContext& ctx, Rng&) {
  // Without a fresh ACK the receiver age keeps growing past theta, so retry.
  if (ctx.transmitted && !ctx.acked) return {0};
  return {theta_ - 1};
}

}  // namespace sleepsched
