#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sleepsched/markov.hpp"
#include "sleepsched/model.hpp"

namespace sleepsched {

struct DelaySample {
  Step step = 0;
  double round_trip_ms = 0.0;
};

/// Round-trip delays logged once per awake step; steps strictly increase.
struct DelayTrace {
  std::vector<DelaySample> samples;

  void validate() const;
};

/// Joint data/feedback channel: a Markov chain whose states carry delays and
/// erasure rates.
struct ChannelModel {
  MarkovChain chain;
  std::vector<ChannelState> states;

  std::size_t n_states() const { return states.size(); }
  void validate() const;
};

/// Bins round-trip delays into `bin_width_ms` buckets and turns consecutive
/// bin transitions into a row-normalized chain. Bins without outgoing
/// transitions become absorbing. Each state splits its bin-centre delay
/// evenly between the data and feedback direction.
ChannelModel fit_channel_from_trace(const DelayTrace& trace, double bin_width_ms,
                                    double data_erasure, double feedback_erasure = 0.0);

/// Replaces the erasure rates of every state.
ChannelModel with_erasure(ChannelModel model, double data_erasure, double feedback_erasure);

/// Sticky random walk over round-trip bins 90..430 ms (per-direction delays
/// of 45..215 ms), used when no recorded trace is configured.
ChannelModel synthetic_leo_channel(double data_erasure, double feedback_erasure = 0.0);

/// Samples `steps` chain transitions and logs the round-trip delay of each
/// visited state (in ms) as a trace.
DelayTrace sample_delay_trace(const ChannelModel& model, StateIndex start, std::size_t steps,
                              Rng& rng);

// CSV with header `step,delay_ms`.
DelayTrace read_delay_trace_csv(std::istream& in);
DelayTrace read_delay_trace_csv(const std::filesystem::path& path);
void write_delay_trace_csv(std::ostream& out, const DelayTrace& trace);

// {"states": [{"delay_ms": rtt, "erasure": p}], "transitions": [[...]]}
nlohmann::json channel_to_json(const ChannelModel& model);
ChannelModel channel_from_json(const nlohmann::json& doc, double feedback_erasure = 0.0);

}  // namespace sleepsched
