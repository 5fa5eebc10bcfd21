#include "sleepsched/psbo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sleepsched {

double resolved_listen_time(const PsboParams& params, const EnergyProfile& profile) {
  return params.t_listen >= 0.0 ? params.t_listen
                                : profile.step - profile.t_wake - profile.t_sense;
}

std::vector<double> transmission_weights(double success_rate, int max_tx_steps) {
  if (max_tx_steps < 1) throw std::invalid_argument("max_tx_steps must be >= 1");
  std::vector<double> p(static_cast<std::size_t>(max_tx_steps));
  double fail = 1.0;
  for (auto& pk : p) {
    pk = success_rate * fail;
    fail *= 1.0 - success_rate;
  }
  return p;
}

double expected_antenna_time(double success_rate, double mean_antenna_time, double t_listen,
                             const EnergyProfile& profile, double available) {
  const double s = std::clamp(success_rate, 0.01, 0.99);
  const double t = std::min(profile.step, s * mean_antenna_time + (1.0 - s) * t_listen / s);
  return std::clamp(t, 0.0, std::max(available, 0.0));
}

double tx_step_energy(bool woke, double tx_probability, double antenna_time,
                      const EnergyProfile& profile) {
  const double wake = woke ? profile.t_wake : 0.0;
  const double antenna = tx_probability * antenna_time;
  const double rest = std::max(0.0, profile.step - wake - profile.t_sense - antenna);
  return wake * profile.p_wake + profile.t_sense * profile.p_sense + antenna * profile.p_antenna +
         rest * (woke ? profile.p_deep_sleep : profile.p_idle);
}

int psbo_search(const ForecastFn& forecast, const LinkEstimator& link, const CostWeights& weights,
                const EnergyProfile& profile, const PsboParams& params) {
  if (params.max_sleep < 1) throw std::invalid_argument("max_sleep must be >= 1");
  const std::vector<double> p = transmission_weights(link.success_rate(), params.max_tx_steps);
  const double t_listen = resolved_listen_time(params, profile);
  const double sleep_energy = weights.w_energy * profile.step * profile.p_deep_sleep;

  // Forecasts are requested in order, so cache them for reuse across
  // candidates: candidate n needs j = n+1 .. n+K.
  std::vector<StepForecast> cache;
  auto at = [&](int j) -> const StepForecast& {
    while (static_cast<int>(cache.size()) < j) cache.push_back(forecast(static_cast<int>(cache.size()) + 1));
    return cache[static_cast<std::size_t>(j - 1)];
  };

  double acc = 0.0;
  double prev_avg = std::numeric_limits<double>::infinity();
  int best = 0;
  while (best < params.max_sleep) {
    const bool woke = best > 0;
    const double available =
        profile.step - (woke ? profile.t_wake : 0.0) - profile.t_sense;
    const double t_a = expected_antenna_time(link.success_rate(), link.mean_antenna_time(),
                                             t_listen, profile, available);
    double total_time = best;
    double avg = best > 0 ? acc / best : 0.0;
    for (int k = 1; k <= params.max_tx_steps; ++k) {
      const StepForecast& f = at(best + k);
      const double pk = p[static_cast<std::size_t>(k - 1)];
      const double dat = weights.w_quality * f.quality;
      const double e = weights.w_energy * tx_step_energy(woke, f.tx_probability, t_a, profile);
      avg = (total_time * avg + pk * (dat + e)) / (total_time + pk);
      total_time += pk;
    }
    if (avg > prev_avg) return best - 1;
    prev_avg = avg;
    ++best;
    acc += weights.w_quality * at(best).quality + sleep_energy;
  }
  return params.max_sleep;
}

int psbo_decide(const Belief& belief, const LinkEstimator& link, const GoTensor& got,
                const CostWeights& weights, const EnergyProfile& profile,
                const PsboParams& params) {
  BeliefForecaster forecaster(belief, normalized_proc_est(belief));
  const bool aoi = belief.metric == MetricKind::kAoi;
  auto forecast = [&](int j) {
    while (forecaster.steps() < j) forecaster.advance();
    const Belief& b = forecaster.belief();
    return StepForecast{predict_cost(b, got), aoi ? 1.0 : mismatch_probability(b)};
  };
  return psbo_search(forecast, link, weights, profile, params);
}

}  // namespace sleepsched
