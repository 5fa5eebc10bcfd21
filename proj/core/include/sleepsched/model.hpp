#pragma once

// Domain types shared by every module plus the per-step metric and cost
// recursions (age updates, energy, data-quality and weighted total cost).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sleepsched {

using StateIndex = std::size_t;
using Step = std::int64_t;

enum class MetricKind { kAoi, kAoii };

std::string_view to_string(MetricKind kind);
MetricKind metric_kind_from_string(std::string_view name);

/// Per-direction delay (seconds) and erasure probability of the joint
/// data/feedback channel in one Markov state.
struct ChannelState {
  double data_delay = 0.0;
  double data_erasure = 0.0;
  double feedback_delay = 0.0;
  double feedback_erasure = 0.0;

  double round_trip() const { return data_delay + feedback_delay; }
  void validate() const;
};

/// Saturating age counter in whole steps, 0 <= value <= cap.
class AgeValue {
 public:
  AgeValue() = default;
  AgeValue(int value, int cap);

  int value() const { return value_; }
  int cap() const { return cap_; }

  friend bool operator==(const AgeValue&, const AgeValue&) = default;

 private:
  int value_ = 0;
  int cap_ = 64;
};

/// Dense |X| x |X| x (M+1) array, laid out [x][x_rx][age] so the age axis is
/// contiguous.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t n_states, int cap, double fill = 0.0);

  std::size_t n_states() const { return n_; }
  int cap() const { return cap_; }
  std::size_t ages() const { return static_cast<std::size_t>(cap_) + 1; }

  double& operator()(StateIndex x, StateIndex x_rx, int age) {
    return data_[offset(x, x_rx) + static_cast<std::size_t>(age)];
  }
  double operator()(StateIndex x, StateIndex x_rx, int age) const {
    return data_[offset(x, x_rx) + static_cast<std::size_t>(age)];
  }

  double* slice(StateIndex x, StateIndex x_rx) { return data_.data() + offset(x, x_rx); }
  const double* slice(StateIndex x, StateIndex x_rx) const {
    return data_.data() + offset(x, x_rx);
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double v);

 private:
  std::size_t offset(StateIndex x, StateIndex x_rx) const { return (x * n_ + x_rx) * ages(); }

  std::size_t n_ = 0;
  int cap_ = 0;
  std::vector<double> data_;
};

/// Goal-oriented cost tensor over (true state, receiver state, capped age).
/// `metric` selects which age feeds the third index.
struct GoTensor {
  Tensor3 costs;
  MetricKind metric = MetricKind::kAoii;

  std::size_t n_states() const { return costs.n_states(); }
  int cap() const { return costs.cap(); }
  void validate() const;
};

struct EnergyProfile {
  // Watts.
  double p_wake = 0.19125;
  double p_sense = 0.14345;
  double p_antenna = 0.50755;
  double p_idle = 0.13795;
  double p_deep_sleep = 0.00487;
  // Seconds.
  double t_wake = 0.047;
  double t_sense = 0.052;
  double t_tx = 0.064;
  double step = 1.0;

  void validate() const;
};

struct CostWeights {
  double w_energy = 1.0;  // 1/J
  double w_quality = 1.0;

  void validate() const;
};

/// Seconds spent in each phase during one step.
struct PhaseTimes {
  double wake = 0.0;
  double sense = 0.0;
  double antenna = 0.0;
  double idle = 0.0;
  double deep_sleep = 0.0;

  double total() const { return wake + sense + antenna + idle + deep_sleep; }
  bool conserves(double step, double tol = 1e-9) const;
};

/// Number of deep-sleep steps chosen after an awake step; 0 keeps the
/// device awake.
struct Action {
  int sleep_steps = 0;

  friend bool operator==(const Action&, const Action&) = default;
};

AgeValue update_aoi(AgeValue aoi, bool delivered);
AgeValue update_aoii(AgeValue aoii, StateIndex x, StateIndex x_rx);

double energy_cost(const PhaseTimes& phases, const EnergyProfile& profile);
double quality_cost(const GoTensor& got, StateIndex x, StateIndex x_rx, AgeValue age);
double total_cost(double energy_j, double quality, const CostWeights& weights);

}  // namespace sleepsched
