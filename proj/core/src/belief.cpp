#include "sleepsched/belief.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace sleepsched {

namespace {

std::vector<double> point_mass(std::size_t n, std::size_t at) {
  std::vector<double> v(n, 0.0);
  v[at] = 1.0;
  return v;
}

std::vector<StateIndex> support(std::span<const double> d) {
  std::vector<StateIndex> out;
  for (StateIndex i = 0; i < d.size(); ++i)
    if (d[i] > 0.0) out.push_back(i);
  return out;
}

void shift_ages(std::vector<double>& d) {
  // Right shift by one; the last bin keeps its own mass plus the incoming.
  const std::size_t m = d.size() - 1;
  const double at_cap = d[m];
  for (std::size_t k = m; k > 0; --k) d[k] = d[k - 1];
  d[0] = 0.0;
  d[m] += at_cap;
}

void predict_distribution(std::vector<double>& out, std::span<const double> d,
                          const RowMatrix& p) {
  const std::size_t n = d.size();
  out.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] == 0.0) continue;
    const auto row = p.row(i);
    for (std::size_t j = 0; j < n; ++j) out[j] += d[i] * row[j];
  }
  double total = 0.0;
  for (double v : out) total += v;
  if (total > 0.0)
    for (double& v : out) v /= total;
}

// Asleep-branch update applied in place, with caller-owned scratch space.
void advance_in_place(Belief& b, const RowMatrix& p_est, std::span<const StateIndex> receivers,
                      std::vector<double>& d_x_scratch, Tensor3& tensor_scratch) {
  predict_distribution(d_x_scratch, b.d_x, p_est);
  if (b.metric == MetricKind::kAoii) {
    tensor_update_into(tensor_scratch, b.t_aoii, b.d_x, d_x_scratch, p_est, receivers);
    std::swap(b.t_aoii, tensor_scratch);
  } else {
    shift_ages(b.d_aoi);
  }
  std::swap(b.d_x, d_x_scratch);
  b.aoi_rx = std::min(b.aoi_rx + 1, b.cap);
}

}  // namespace

Belief initial_belief(std::size_t n_states, int cap, MetricKind metric, StateIndex x0,
                      double prior, Step t_awake) {
  if (n_states < 2) throw std::invalid_argument("belief needs at least two process states");
  if (x0 >= n_states) throw std::invalid_argument("initial state outside the process space");
  if (cap < 1) throw std::invalid_argument("age cap must be positive");
  if (prior < 0.0) throw std::invalid_argument("count prior must be nonnegative");

  Belief b;
  b.metric = metric;
  b.cap = cap;
  b.x_tx = x0;
  b.proc_counts = RowMatrix(n_states, n_states, prior);
  b.d_x = point_mass(n_states, x0);
  b.d_x_rx = point_mass(n_states, x0);
  b.x_rx = x0;
  b.aoi_rx = 0;
  b.t_awake = t_awake;
  if (metric == MetricKind::kAoi) {
    b.d_aoi = point_mass(static_cast<std::size_t>(cap) + 1, 0);
  } else {
    b.t_aoii = Tensor3(n_states, cap);
    for (StateIndex x = 0; x < n_states; ++x)
      for (StateIndex xr = 0; xr < n_states; ++xr) b.t_aoii(x, xr, x == xr ? 0 : 1) = 1.0;
  }
  return b;
}

RowMatrix normalized_proc_est(const RowMatrix& counts) {
  RowMatrix p = counts;
  const double uniform = 1.0 / static_cast<double>(p.cols());
  for (std::size_t r = 0; r < p.rows(); ++r) {
    auto row = p.row(r);
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum <= 0.0) {
      std::fill(row.begin(), row.end(), uniform);
      continue;
    }
    for (double& v : row) v /= sum;
  }
  return p;
}

RowMatrix normalized_proc_est(const Belief& belief) {
  return normalized_proc_est(belief.proc_counts);
}

void tensor_update_into(Tensor3& out, const Tensor3& prev, std::span<const double> d_x_prev,
                        std::span<const double> d_x_new, const RowMatrix& p_est,
                        std::span<const StateIndex> receivers) {
  const std::size_t n = prev.n_states();
  const int cap = prev.cap();
  const std::size_t ages = prev.ages();
  if (d_x_prev.size() != n || d_x_new.size() != n || p_est.rows() != n)
    throw std::invalid_argument("tensor_update: dimension mismatch");

  if (out.n_states() != n || out.cap() != cap)
    out = Tensor3(n, cap);
  else
    out.fill(0.0);

  std::vector<StateIndex> all;
  if (receivers.empty()) {
    all.resize(n);
    for (StateIndex i = 0; i < n; ++i) all[i] = i;
    receivers = all;
  }

  std::vector<double> shifted(ages);
  for (StateIndex x = 0; x < n; ++x) {
    const double from = d_x_prev[x];
    if (!(from > 0.0)) continue;
    for (StateIndex xr : receivers) {
      const double* src = prev.slice(x, xr);
      shifted[0] = 0.0;
      for (std::size_t k = 0; k + 1 < ages; ++k) shifted[k + 1] = src[k];
      shifted[ages - 1] += src[ages - 1];

      for (StateIndex xn = 0; xn < n; ++xn) {
        const double to = d_x_new[xn];
        if (!(to > 0.0)) continue;
        if (xn == xr) {
          out(xn, xr, 0) = 1.0;
          continue;
        }
        const double w = (to == 1.0) ? from : from * p_est(x, xn) / to;
        if (w == 0.0) continue;
        double* dst = out.slice(xn, xr);
        for (std::size_t k = 0; k < ages; ++k) dst[k] += w * shifted[k];
      }
    }
  }
}

Tensor3 tensor_update(const Tensor3& prev, std::span<const double> d_x_prev,
                      std::span<const double> d_x_new, const RowMatrix& p_est,
                      std::span<const StateIndex> receivers) {
  Tensor3 out;
  tensor_update_into(out, prev, d_x_prev, d_x_new, p_est, receivers);
  return out;
}

Belief propagate(const Belief& belief, const RowMatrix& p_est) {
  Belief b = belief;
  std::vector<double> d_scratch;
  Tensor3 t_scratch;
  const auto receivers = support(b.d_x_rx);
  advance_in_place(b, p_est, receivers, d_scratch, t_scratch);
  return b;
}

Belief observe(const Belief& belief, Step t, StateIndex sensed,
               const std::optional<AckReport>& ack) {
  const std::size_t n = belief.n_states();
  if (sensed >= n) throw std::invalid_argument("sensed state outside the process space");

  Belief b = belief;
  const StateIndex prev = belief.x_tx;
  const int slept = belief.n_sleep;
  if (prev == sensed) {
    b.proc_counts(prev, prev) += slept + 1;
  } else {
    b.proc_counts(prev, prev) += slept / 2;
    b.proc_counts(prev, sensed) += 1;
    b.proc_counts(sensed, sensed) += slept - slept / 2;
  }

  const std::vector<double> d_new = point_mass(n, sensed);
  const bool acked = ack.has_value() && ack->acked;
  if (acked) b.x_rx = sensed;
  b.aoi_rx = acked ? 0 : std::min(belief.aoi_rx + 1, belief.cap);

  if (b.metric == MetricKind::kAoii) {
    std::vector<StateIndex> receivers = support(belief.d_x_rx);
    if (std::find(receivers.begin(), receivers.end(), sensed) == receivers.end())
      receivers.push_back(sensed);
    b.t_aoii = tensor_update(belief.t_aoii, belief.d_x, d_new, normalized_proc_est(belief),
                             receivers);
  } else {
    b.d_aoi = point_mass(static_cast<std::size_t>(b.cap) + 1, static_cast<std::size_t>(b.aoi_rx));
  }

  b.x_tx = sensed;
  b.d_x = d_new;
  b.d_x_rx = point_mass(n, b.x_rx);
  b.t_awake = t;
  b.n_sleep = 0;
  return b;
}

Belief belief_update(const Belief& belief, Step t, std::optional<StateIndex> sensed,
                     const std::optional<AckReport>& ack) {
  if (belief.awake_at(t)) {
    if (!sensed) throw std::logic_error("belief_update: awake step without a sensed value");
    return observe(belief, t, *sensed, ack);
  }
  if (sensed) throw std::logic_error("belief_update: sensed value while asleep");
  if (ack) throw std::logic_error("belief_update: transmission outcome while asleep");
  return propagate(belief, normalized_proc_est(belief));
}

Belief wake_update(const Belief& belief, Step t, StateIndex sensed,
                   const std::optional<AckReport>& ack) {
  if (!belief.awake_at(t)) throw std::logic_error("wake_update: device is still asleep at t");
  const Step slept = t - belief.t_awake - 1;
  if (slept <= 0) return observe(belief, t, sensed, ack);

  BeliefForecaster forecast(belief, normalized_proc_est(belief));
  for (Step k = 0; k < slept; ++k) forecast.advance();
  return observe(forecast.belief(), t, sensed, ack);
}

double predict_cost(const Belief& belief, const GoTensor& got) {
  const std::size_t n = belief.n_states();
  if (got.n_states() != n || got.cap() != belief.cap)
    throw std::invalid_argument("predict_cost: belief and GoT dimensions differ");
  if (got.metric != belief.metric)
    throw std::invalid_argument("predict_cost: belief and GoT use different age metrics");

  const std::size_t ages = got.costs.ages();
  double cost = 0.0;
  for (StateIndex x = 0; x < n; ++x) {
    const double px = belief.d_x[x];
    if (px == 0.0) continue;
    for (StateIndex xr = 0; xr < n; ++xr) {
      const double pr = belief.d_x_rx[xr];
      if (pr == 0.0) continue;
      const double* g = got.costs.slice(x, xr);
      const double* age = belief.metric == MetricKind::kAoii ? belief.t_aoii.slice(x, xr)
                                                             : belief.d_aoi.data();
      double inner = 0.0;
      for (std::size_t k = 0; k < ages; ++k) inner += age[k] * g[k];
      cost += px * pr * inner;
    }
  }
  return cost;
}

double mismatch_probability(const Belief& belief) {
  double same = 0.0;
  for (StateIndex x = 0; x < belief.n_states(); ++x) same += belief.d_x[x] * belief.d_x_rx[x];
  return std::clamp(1.0 - same, 0.0, 1.0);
}

BeliefForecaster::BeliefForecaster(const Belief& start, RowMatrix p_est)
    : current_(start), p_est_(std::move(p_est)), receivers_(support(start.d_x_rx)) {
  if (p_est_.rows() != start.n_states())
    throw std::invalid_argument("BeliefForecaster: estimate dimension mismatch");
}

void BeliefForecaster::advance() {
  advance_in_place(current_, p_est_, receivers_, d_x_scratch_, tensor_scratch_);
  ++steps_;
}

nlohmann::json belief_to_json(const Belief& b) {
  nlohmann::json j = {{"metric", std::string(to_string(b.metric))},
                      {"cap", b.cap},
                      {"x_tx", b.x_tx},
                      {"x_rx", b.x_rx},
                      {"aoi_rx", b.aoi_rx},
                      {"n_sleep", b.n_sleep},
                      {"t_awake", b.t_awake},
                      {"proc_counts", b.proc_counts.to_rows()},
                      {"d_x", b.d_x},
                      {"d_x_rx", b.d_x_rx}};
  if (b.metric == MetricKind::kAoi) {
    j["d_aoi"] = b.d_aoi;
  } else {
    nlohmann::json slices = nlohmann::json::array();
    for (StateIndex x = 0; x < b.n_states(); ++x)
      for (StateIndex xr = 0; xr < b.n_states(); ++xr) {
        if (b.d_x_rx[xr] == 0.0) continue;
        const double* s = b.t_aoii.slice(x, xr);
        slices.push_back({{"x", x}, {"x_rx", xr},
                          {"dist", std::vector<double>(s, s + b.t_aoii.ages())}});
      }
    j["t_aoii"] = std::move(slices);
  }
  return j;
}

}  // namespace sleepsched
