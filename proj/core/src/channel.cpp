#include "sleepsched/channel.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "sleepsched/errors.hpp"

namespace sleepsched {

void DelayTrace::validate() const {
  if (samples.empty()) throw std::invalid_argument("delay trace is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].round_trip_ms >= 0.0))
      throw std::invalid_argument("delay trace contains a negative delay");
    if (i > 0 && samples[i].step <= samples[i - 1].step)
      throw std::invalid_argument("delay trace steps must strictly increase");
  }
}

void ChannelModel::validate() const {
  if (states.size() != chain.n_states())
    throw std::invalid_argument("channel state annotations do not match chain size");
  for (const auto& s : states) s.validate();
}

namespace {

ChannelState state_for_round_trip(double rtt_ms, double data_erasure, double feedback_erasure) {
  ChannelState s;
  s.data_delay = rtt_ms / 2000.0;
  s.feedback_delay = rtt_ms / 2000.0;
  s.data_erasure = data_erasure;
  s.feedback_erasure = feedback_erasure;
  s.validate();
  return s;
}

}  // namespace

ChannelModel fit_channel_from_trace(const DelayTrace& trace, double bin_width_ms,
                                    double data_erasure, double feedback_erasure) {
  trace.validate();
  if (!(bin_width_ms > 0.0)) throw std::invalid_argument("bin width must be positive");

  // Occupied bins in ascending delay order.
  std::map<long long, std::size_t> bin_to_state;
  std::vector<long long> bins;
  bins.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    const long long b = static_cast<long long>(std::floor(s.round_trip_ms / bin_width_ms));
    bins.push_back(b);
    bin_to_state.emplace(b, 0);
  }
  std::size_t next = 0;
  for (auto& [bin, idx] : bin_to_state) idx = next++;

  const std::size_t n = bin_to_state.size();
  RowMatrix counts(n, n);
  for (std::size_t i = 1; i < bins.size(); ++i)
    counts(bin_to_state[bins[i - 1]], bin_to_state[bins[i]]) += 1.0;

  for (std::size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    for (double v : counts.row(r)) sum += v;
    if (sum == 0.0) {
      counts(r, r) = 1.0;
      continue;
    }
    for (double& v : counts.row(r)) v /= sum;
  }

  ChannelModel model{MarkovChain(std::move(counts)), {}};
  model.states.reserve(n);
  for (const auto& [bin, idx] : bin_to_state) {
    const double centre = (static_cast<double>(bin) + 0.5) * bin_width_ms;
    model.states.push_back(state_for_round_trip(centre, data_erasure, feedback_erasure));
  }
  return model;
}

ChannelModel with_erasure(ChannelModel model, double data_erasure, double feedback_erasure) {
  for (auto& s : model.states) {
    s.data_erasure = data_erasure;
    s.feedback_erasure = feedback_erasure;
    s.validate();
  }
  return model;
}

ChannelModel synthetic_leo_channel(double data_erasure, double feedback_erasure) {
  constexpr std::size_t kBins = 18;
  ChannelModel model{adjacent_state_process(kBins, 0.2), {}};
  for (std::size_t i = 0; i < kBins; ++i)
    model.states.push_back(
        state_for_round_trip(90.0 + 20.0 * static_cast<double>(i), data_erasure, feedback_erasure));
  return model;
}

DelayTrace sample_delay_trace(const ChannelModel& model, StateIndex start, std::size_t steps,
                              Rng& rng) {
  DelayTrace trace;
  trace.samples.reserve(steps);
  StateIndex s = start;
  for (std::size_t t = 0; t < steps; ++t) {
    trace.samples.push_back({static_cast<Step>(t), model.states[s].round_trip() * 1000.0});
    s = step_chain(model.chain, s, rng);
  }
  return trace;
}

DelayTrace read_delay_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("delay trace: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "step,delay_ms")
    throw ConfigError("delay trace: expected header 'step,delay_ms', got '" + line + "'");
  DelayTrace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("delay trace line " + std::to_string(lineno) + ": expected two fields");
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const long long step = std::stoll(a, &used);
      if (used != a.size()) throw std::invalid_argument("trailing characters");
      const double delay = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument("trailing characters");
      trace.samples.push_back({step, delay});
    } catch (const std::exception&) {
      throw ConfigError("delay trace line " + std::to_string(lineno) + ": cannot parse '" + line +
                        "'");
    }
  }
  try {
    trace.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("delay trace: ") + e.what());
  }
  return trace;
}

DelayTrace read_delay_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open delay trace '" + path.string() + "'");
  return read_delay_trace_csv(in);
}

void write_delay_trace_csv(std::ostream& out, const DelayTrace& trace) {
  out << "step,delay_ms\n";
  std::ostringstream row;
  row.precision(17);
  for (const auto& s : trace.samples) {
    row.str({});
    row << s.step << ',' << s.round_trip_ms << '\n';
    out << row.str();
  }
}

nlohmann::json channel_to_json(const ChannelModel& model) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : model.states)
    states.push_back({{"delay_ms", s.round_trip() * 1000.0}, {"erasure", s.data_erasure}});
  return {{"states", states}, {"transitions", model.chain.transitions().to_rows()}};
}

ChannelModel channel_from_json(const nlohmann::json& doc, double feedback_erasure) {
  try {
    const auto& states = doc.at("states");
    auto rows = doc.at("transitions").get<std::vector<std::vector<double>>>();
    ChannelModel model{MarkovChain(RowMatrix::from_rows(rows)), {}};
    for (const auto& s : states)
      model.states.push_back(state_for_round_trip(s.at("delay_ms").get<double>(),
                                                  s.at("erasure").get<double>(), feedback_erasure));
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("channel JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("channel JSON: ") + e.what());
  }
}

}  // namespace sleepsched
