#pragma once

// Sleep-duration search over forecast beliefs: for each candidate duration n
// the expected time-averaged cost of sleeping n steps and then transmitting
// is estimated, and the search stops at the first increase.

#include <functional>
#include <vector>

#include "sleepsched/belief.hpp"
#include "sleepsched/link_estimator.hpp"
#include "sleepsched/model.hpp"

namespace sleepsched {

struct PsboParams {
  int max_sleep = 300;
  int max_tx_steps = 10;
  /// Antenna-on time of an unacknowledged attempt; negative selects
  /// T - T_w - T_s.
  double t_listen = -1.0;
};

/// Forecast quantities for the belief j steps ahead.
struct StepForecast {
  double quality = 0.0;        // expected unweighted data-quality cost
  double tx_probability = 1.0;  // probability that a waking device transmits
};

/// Supplies the forecast for j = 1, 2, ...; called with nondecreasing j.
using ForecastFn = std::function<StepForecast(int j)>;

double resolved_listen_time(const PsboParams& params, const EnergyProfile& profile);

/// p_k = s (1 - s)^(k-1), k = 1..max_tx_steps.
std::vector<double> transmission_weights(double success_rate, int max_tx_steps);

/// Expected antenna-on time of one attempt, capped at `available`.
double expected_antenna_time(double success_rate, double mean_antenna_time, double t_listen,
                             const EnergyProfile& profile, double available);

/// Unweighted expected energy of one post-wake transmission step.
/// `woke` charges the wake-up phase and leaves the remainder in deep sleep;
/// otherwise the remainder is idle.
double tx_step_energy(bool woke, double tx_probability, double antenna_time,
                      const EnergyProfile& profile);

/// Core search on an abstract forecast. Returns a value in [0, max_sleep].
int psbo_search(const ForecastFn& forecast, const LinkEstimator& link, const CostWeights& weights,
                const EnergyProfile& profile, const PsboParams& params);

/// Forecasts from the device belief with its current process estimate.
int psbo_decide(const Belief& belief, const LinkEstimator& link, const GoTensor& got,
                const CostWeights& weights, const EnergyProfile& profile,
                const PsboParams& params);

}  // namespace sleepsched
