#include "sleepsched/got.hpp"

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "sleepsched/errors.hpp"

namespace sleepsched {

GoTensor make_got_a(const ProcessSpace& space, const std::set<StateIndex>& critical, double alpha,
                    double beta_small, int cap) {
  if (space.n_states < 2) throw std::invalid_argument("GoT-A needs at least two states");
  if (!(alpha > beta_small && beta_small > 0.0))
    throw std::invalid_argument("GoT-A requires alpha > beta_small > 0");
  for (StateIndex c : critical)
    if (c >= space.n_states) throw std::invalid_argument("critical state outside the space");

  GoTensor got{Tensor3(space.n_states, cap), MetricKind::kAoii};
  for (StateIndex x = 0; x < space.n_states; ++x) {
    for (StateIndex xr = 0; xr < space.n_states; ++xr) {
      if (x == xr) continue;
      const bool hazardous = critical.contains(x) && !critical.contains(xr);
      const double slope = hazardous ? alpha : beta_small;
      for (int d = 0; d <= cap; ++d) got.costs(x, xr, d) = slope * d;
    }
  }
  return got;
}

GotB make_got_b(const ProcessSpace& space, double v, int cap, Rng& rng) {
  if (space.n_states < 2) throw std::invalid_argument("GoT-B needs at least two states");
  if (!(v > 0.0 && v <= 0.5)) throw std::invalid_argument("GoT-B variability must lie in (0, 0.5]");
  const std::size_t n = space.n_states;
  GotB out{GoTensor{Tensor3(n, cap), MetricKind::kAoii}, RowMatrix(n, n), RowMatrix(n, n)};
  for (StateIndex x = 0; x < n; ++x) {
    for (StateIndex xr = 0; xr < n; ++xr) {
      // Draws are taken for every pair so the stream does not depend on which
      // pairs are synchronized.
      const double base = -0.5 - v + 2.0 * v * uniform01(rng);
      const double slope = 0.5 - v + 2.0 * v * uniform01(rng);
      out.base(x, xr) = base;
      out.slope(x, xr) = slope;
      if (x == xr) continue;
      for (int d = 0; d <= cap; ++d) out.got.costs(x, xr, d) = -base + slope * d;
    }
  }
  return out;
}

nlohmann::json got_to_json(const GoTensor& got) {
  const std::size_t n = got.n_states();
  nlohmann::json costs = nlohmann::json::array();
  for (StateIndex x = 0; x < n; ++x) {
    nlohmann::json plane = nlohmann::json::array();
    for (StateIndex xr = 0; xr < n; ++xr) {
      const double* s = got.costs.slice(x, xr);
      plane.push_back(std::vector<double>(s, s + got.costs.ages()));
    }
    costs.push_back(std::move(plane));
  }
  return {{"metric", std::string(to_string(got.metric))},
          {"n_states", n},
          {"cap", got.cap()},
          {"costs", std::move(costs)}};
}

GoTensor got_from_json(const nlohmann::json& doc) {
  try {
    const auto n = doc.at("n_states").get<std::size_t>();
    const int cap = doc.at("cap").get<int>();
    GoTensor got{Tensor3(n, cap), metric_kind_from_string(doc.at("metric").get<std::string>())};
    const auto& costs = doc.at("costs");
    if (costs.size() != n) throw std::invalid_argument("costs: wrong number of planes");
    for (StateIndex x = 0; x < n; ++x) {
      if (costs[x].size() != n) throw std::invalid_argument("costs: wrong number of rows");
      for (StateIndex xr = 0; xr < n; ++xr) {
        const auto row = costs[x][xr].get<std::vector<double>>();
        if (row.size() != got.costs.ages()) throw std::invalid_argument("costs: wrong age length");
        std::copy(row.begin(), row.end(), got.costs.slice(x, xr));
      }
    }
    got.validate();
    return got;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("GoT JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("GoT JSON: ") + e.what());
  }
}

ProcessSpace temperature_space() {
  ProcessSpace space{8, {}};
  for (int i = 0; i < 8; ++i) space.labels.push_back(-10.0 + 5.0 * i);
  return space;
}

std::set<StateIndex> states_below(const ProcessSpace& space, double threshold) {
  std::set<StateIndex> out;
  for (StateIndex i = 0; i < space.labels.size(); ++i)
    if (space.labels[i] < threshold) out.insert(i);
  return out;
}

}  // namespace sleepsched
