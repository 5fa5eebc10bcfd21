#pragma once

// Device-side belief and its evolution: one-step prediction while asleep,
// the observation update on waking, the AoII tensor propagation and the
// expected data-quality cost of a belief.

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sleepsched/markov.hpp"
#include "sleepsched/model.hpp"

namespace sleepsched {

/// Outcome of one transmission attempt as seen by the device.
struct AckReport {
  bool acked = false;
  double round_trip = 0.0;  // seconds from transmission start to ACK, if acked
};

/// Everything the device knows. Raw transition counts are the canonical
/// process estimate; `normalized_proc_est` derives probabilities on demand.
///
/// Only one age belief is active: `d_aoi` under MetricKind::kAoi, `t_aoii`
/// under MetricKind::kAoii. `t_aoii(x, x_rx, ·)` is the AoII distribution
/// given true state x and receiver state x_rx; it is maintained for the
/// receiver states the device considers possible (d_x_rx > 0), other slices
/// are zero.
struct Belief {
  MetricKind metric = MetricKind::kAoii;
  int cap = 64;

  StateIndex x_tx = 0;
  RowMatrix proc_counts;
  std::vector<double> d_x;
  std::vector<double> d_x_rx;
  std::vector<double> d_aoi;
  Tensor3 t_aoii;

  int n_sleep = 0;
  Step t_awake = -1;

  // Receiver value and AoI as last confirmed by ACKs.
  StateIndex x_rx = 0;
  int aoi_rx = 0;

  std::size_t n_states() const { return d_x.size(); }
  /// True when step t lies after the current sleep interval.
  bool awake_at(Step t) const { return t > t_awake + n_sleep; }
};

/// Synchronized start: process, buffer and receiver all hold `x0`, ages are
/// zero, and every transition count starts at `prior`.
Belief initial_belief(std::size_t n_states, int cap, MetricKind metric, StateIndex x0,
                      double prior = 1.0, Step t_awake = -1);

/// Row-normalized counts; all-zero rows become uniform.
RowMatrix normalized_proc_est(const RowMatrix& counts);
RowMatrix normalized_proc_est(const Belief& belief);

/// AoII tensor propagation. For every previous state x with d_x_prev(x) > 0
/// and receiver state x_rx in `receivers`, the age distribution is shifted by
/// one (mass at the cap stays there) and redistributed over the new states x''
/// with d_x_new(x'') > 0, weighted by the conditional probability of having
/// come from x. x'' == x_rx resets to age 0. Slices for receivers outside
/// `receivers` are zero in the result. An empty `receivers` means all states.
Tensor3 tensor_update(const Tensor3& prev, std::span<const double> d_x_prev,
                      std::span<const double> d_x_new, const RowMatrix& p_est,
                      std::span<const StateIndex> receivers = {});
/// Same as tensor_update, writing into `out` (resized and overwritten).
void tensor_update_into(Tensor3& out, const Tensor3& prev, std::span<const double> d_x_prev,
                        std::span<const double> d_x_new, const RowMatrix& p_est,
                        std::span<const StateIndex> receivers = {});

/// One asleep step: d_x <- d_x * p_est, ages advance, buffer unchanged.
Belief propagate(const Belief& belief, const RowMatrix& p_est);

/// Awake step at t with sensed value and optional transmission outcome:
/// transition counts absorb the evidence of the elapsed sleep, d_x and d_x_rx
/// collapse to point masses, and the age belief is updated.
Belief observe(const Belief& belief, Step t, StateIndex sensed,
               const std::optional<AckReport>& ack);

/// Single-step update. `sensed` must be present exactly when the device is
/// awake at t; otherwise std::logic_error.
Belief belief_update(const Belief& belief, Step t, std::optional<StateIndex> sensed,
                     const std::optional<AckReport>& ack);

/// Lazy form used on waking: replays the prediction step for every slept
/// step since t_awake, then applies the awake update at t.
Belief wake_update(const Belief& belief, Step t, StateIndex sensed,
                   const std::optional<AckReport>& ack);

/// Expected data-quality cost of the belief under `got`.
double predict_cost(const Belief& belief, const GoTensor& got);

/// Probability that the true state differs from the receiver state.
double mismatch_probability(const Belief& belief);

/// Advances a copy of a belief step by step without reallocating, for
/// forecasting over candidate sleep durations.
class BeliefForecaster {
 public:
  BeliefForecaster(const Belief& start, RowMatrix p_est);

  void advance();
  const Belief& belief() const { return current_; }
  int steps() const { return steps_; }

 private:
  Belief current_;
  RowMatrix p_est_;
  std::vector<StateIndex> receivers_;
  std::vector<double> d_x_scratch_;
  Tensor3 tensor_scratch_;
  int steps_ = 0;
};

nlohmann::json belief_to_json(const Belief& belief);

}  // namespace sleepsched
