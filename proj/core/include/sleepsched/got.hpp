#pragma once

#include <set>

#include <nlohmann/json_fwd.hpp>

#include "sleepsched/markov.hpp"
#include "sleepsched/model.hpp"
#include "sleepsched/rng.hpp"

namespace sleepsched {

/// Critical/non-critical tensor keyed by AoII: a critical true state paired
/// with a non-critical receiver state costs `alpha` per age step, every other
/// mismatch `beta_small` per step, synchronized pairs cost nothing.
GoTensor make_got_a(const ProcessSpace& space, const std::set<StateIndex>& critical, double alpha,
                    double beta_small, int cap);

/// Random linear tensor keyed by AoII, with the per-pair draws kept for
/// inspection. Costs are degradations (negated quality): for x != x_rx,
/// cost(Δ) = -base + slope * Δ with base ~ U[-0.5-v, -0.5+v] and
/// slope ~ U[0.5-v, 0.5+v]; synchronized pairs cost nothing.
struct GotB {
  GoTensor got;
  RowMatrix base;
  RowMatrix slope;
};

GotB make_got_b(const ProcessSpace& space, double v, int cap, Rng& rng);

// {"metric": "aoii", "n_states": n, "cap": M, "costs": [x][x_rx][age]}
nlohmann::json got_to_json(const GoTensor& got);
GoTensor got_from_json(const nlohmann::json& doc);

/// Temperature-bin labels for the default 8-state process (degrees C).
ProcessSpace temperature_space();
/// States whose label lies strictly below `threshold`.
std::set<StateIndex> states_below(const ProcessSpace& space, double threshold);

}  // namespace sleepsched
