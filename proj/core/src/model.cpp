#include "sleepsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sleepsched {

std::string_view to_string(MetricKind kind) {
  return kind == MetricKind::kAoi ? "aoi" : "aoii";
}

MetricKind metric_kind_from_string(std::string_view name) {
  if (name == "aoi") return MetricKind::kAoi;
  if (name == "aoii") return MetricKind::kAoii;
  throw std::invalid_argument("unknown metric kind '" + std::string(name) +
                              "' (expected aoi or aoii)");
}

void ChannelState::validate() const {
  if (data_delay < 0.0 || feedback_delay < 0.0)
    throw std::invalid_argument("channel delays must be nonnegative");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(data_erasure) || !prob(feedback_erasure))
    throw std::invalid_argument("channel erasure rates must lie in [0, 1]");
}

AgeValue::AgeValue(int value, int cap) : value_(value), cap_(cap) {
  if (cap <= 0) throw std::invalid_argument("age cap must be positive");
  if (value < 0 || value > cap) throw std::invalid_argument("age value outside [0, cap]");
}

Tensor3::Tensor3(std::size_t n_states, int cap, double fill)
    : n_(n_states), cap_(cap) {
  if (cap < 0) throw std::invalid_argument("tensor age cap must be nonnegative");
  data_.assign(n_ * n_ * ages(), fill);
}

void Tensor3::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void GoTensor::validate() const {
  if (costs.n_states() < 2) throw std::invalid_argument("GoT needs at least two process states");
  if (costs.cap() < 1) throw std::invalid_argument("GoT age cap must be positive");
  for (double v : costs.raw())
    if (!std::isfinite(v)) throw std::invalid_argument("GoT entries must be finite");
}

void EnergyProfile::validate() const {
  for (double v : {p_wake, p_sense, p_antenna, p_idle, p_deep_sleep, t_wake, t_sense, t_tx, step})
    if (!(v >= 0.0)) throw std::invalid_argument("energy profile values must be nonnegative");
  if (step <= 0.0) throw std::invalid_argument("step duration must be positive");
  if (t_wake + t_sense + t_tx > step)
    throw std::invalid_argument("wake + sense + transmit durations exceed the step duration");
}

void CostWeights::validate() const {
  if (w_energy < 0.0 || w_quality < 0.0)
    throw std::invalid_argument("cost weights must be nonnegative");
  if (w_energy == 0.0 && w_quality == 0.0)
    throw std::invalid_argument("cost weights must not both be zero");
}

bool PhaseTimes::conserves(double step, double tol) const {
  return wake >= 0.0 && sense >= 0.0 && antenna >= 0.0 && idle >= 0.0 && deep_sleep >= 0.0 &&
         std::abs(total() - step) <= tol;
}

AgeValue update_aoi(AgeValue aoi, bool delivered) {
  if (delivered) return AgeValue(0, aoi.cap());
  return AgeValue(std::min(aoi.value() + 1, aoi.cap()), aoi.cap());
}

AgeValue update_aoii(AgeValue aoii, StateIndex x, StateIndex x_rx) {
  if (x == x_rx) return AgeValue(0, aoii.cap());
  return AgeValue(std::min(aoii.value() + 1, aoii.cap()), aoii.cap());
}

double energy_cost(const PhaseTimes& phases, const EnergyProfile& profile) {
  return phases.wake * profile.p_wake + phases.sense * profile.p_sense +
         phases.antenna * profile.p_antenna + phases.idle * profile.p_idle +
         phases.deep_sleep * profile.p_deep_sleep;
}

double quality_cost(const GoTensor& got, StateIndex x, StateIndex x_rx, AgeValue age) {
  if (x >= got.n_states() || x_rx >= got.n_states() || age.value() > got.cap())
    throw std::invalid_argument("quality_cost index outside GoT bounds");
  return got.costs(x, x_rx, age.value());
}

double total_cost(double energy_j, double quality, const CostWeights& weights) {
  return weights.w_energy * energy_j + weights.w_quality * quality;
}

}  // namespace sleepsched
