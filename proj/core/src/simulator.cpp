#include "sleepsched/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sleepsched/errors.hpp"

namespace sleepsched {

void SimConfig::validate() const {
  const std::size_t n = process.chain.n_states();
  if (n < 2) throw std::invalid_argument("process needs at least two states");
  if (!process.space.labels.empty() && process.space.labels.size() != n)
    throw std::invalid_argument("process labels do not match the number of states");
  got.validate();
  if (got.n_states() != n)
    throw std::invalid_argument("GoT dimensions do not match the process state count");
  channel.validate();
  if (channel.n_states() == 0) throw std::invalid_argument("channel has no states");
  profile.validate();
  weights.validate();
  if (t_final < 1) throw std::invalid_argument("t_final must be >= 1");
  if (strategy.max_sleep() < 1) throw std::invalid_argument("max_sleep must be >= 1");
  if (count_prior < 0.0) throw std::invalid_argument("count prior must be nonnegative");
}

void CostLedger::append(const StepRecord& r) {
  ++steps_;
  sum_e_ += r.energy_j;
  sum_q_ += r.quality_cost;
  sum_total_ += r.total_cost;
  if (keep_) records_.push_back(r);
}

double CostLedger::c_e() const { return steps_ ? sum_e_ / static_cast<double>(steps_) : 0.0; }
double CostLedger::c_qual() const { return steps_ ? sum_q_ / static_cast<double>(steps_) : 0.0; }
double CostLedger::c_avg() const {
  return steps_ ? sum_total_ / static_cast<double>(steps_) : 0.0;
}

namespace {

StrategyEnv make_env(const SimConfig& c) {
  return StrategyEnv{&c.got, c.weights, c.profile, c.t_final};
}

}  // namespace

Simulator::Simulator(SimConfig config, bool keep_records)
    : config_(std::move(config)),
      env_rng_(make_rng(config_.seed, 0)),
      strategy_rng_(make_rng(config_.seed, 1)),
      link_(config_.profile.t_tx),
      ledger_(keep_records) {
  config_.validate();
  strategy_ = make_strategy(config_.strategy, make_env(config_));
  t_listen_ = resolved_listen_time(config_.strategy.psbo, config_.profile);

  const int cap = config_.got.cap();
  const auto pi_x = stationary_distribution(config_.process.chain);
  const auto pi_c = stationary_distribution(config_.channel.chain);
  state_.x = sample_index(pi_x, env_rng_);
  state_.channel = sample_index(pi_c, env_rng_);
  state_.x_tx = state_.x;
  state_.x_rx = state_.x;
  state_.aoi_tx = AgeValue(0, cap);
  state_.aoi_rx = AgeValue(0, cap);
  state_.aoii = AgeValue(0, cap);
  state_.belief = initial_belief(config_.process.chain.n_states(), cap, config_.metric(), state_.x,
                                 config_.count_prior);

  const int initial = std::clamp(strategy_->initial_action().sleep_steps, 0, config_.strategy.max_sleep());
  state_.sleep_remaining = initial;
  state_.belief.n_sleep = initial;
  state_.prev_asleep = initial > 0;
}

StepRecord Simulator::step() {
  if (done()) throw std::logic_error("simulation already finished");
  const EnergyProfile& prof = config_.profile;
  SystemState& s = state_;

  if (t_ > 0) {
    s.channel = step_chain(config_.channel.chain, s.channel, env_rng_);
    s.x = step_chain(config_.process.chain, s.x, env_rng_);
  }

  StepRecord rec;
  rec.step = t_;
  bool delivered = false;

  if (s.sleep_remaining > 0) {
    rec.slept = true;
    rec.phases.deep_sleep = prof.step;
    s.aoi_tx = update_aoi(s.aoi_tx, false);
    if (--s.sleep_remaining == 0 && strategy_->rearm_on_expiry()) {
      const int again = std::max(1, strategy_->initial_action().sleep_steps);
      s.sleep_remaining = again;
      s.belief.n_sleep += again;
    }
  } else {
    rec.phases.wake = s.prev_asleep ? prof.t_wake : 0.0;
    rec.phases.sense = prof.t_sense;
    s.x_tx = s.x;
    s.aoi_tx = AgeValue(0, s.aoi_tx.cap());

    const double available = prof.step - rec.phases.wake - rec.phases.sense;
    rec.transmitted = config_.metric() == MetricKind::kAoi || strategy_->forces_transmission() ||
                      s.x_tx != s.belief.x_rx;
    std::optional<AckReport> report;
    if (rec.transmitted) {
      const ChannelState& cs = config_.channel.states[s.channel];
      delivered = bernoulli(env_rng_, 1.0 - cs.data_erasure);
      if (delivered) {
        s.x_rx = s.x_tx;
        rec.acked = bernoulli(env_rng_, 1.0 - cs.feedback_erasure);
      }
      rec.phases.antenna = std::min(prof.t_tx + (rec.acked ? cs.round_trip() : t_listen_), available);
      report = AckReport{rec.acked, rec.phases.antenna};
      link_.record(rec.acked, rec.phases.antenna);
    }
    s.belief = wake_update(s.belief, t_, s.x_tx, report);

    const DecisionContext ctx{t_, s.belief, link_, rec.transmitted, rec.acked};
    const int action =
        std::clamp(strategy_->decide(ctx, strategy_rng_).sleep_steps, 0, config_.strategy.max_sleep());
    const double rest = std::max(0.0, available - rec.phases.antenna);
    (action > 0 ? rec.phases.deep_sleep : rec.phases.idle) = rest;
    s.belief.n_sleep = action;
    s.sleep_remaining = action;
  }
  s.prev_asleep = rec.slept;

  s.aoi_rx = update_aoi(s.aoi_rx, delivered);
  s.aoii = update_aoii(s.aoii, s.x, s.x_rx);
  rec.aoi_rx = s.aoi_rx.value();
  rec.aoii = s.aoii.value();

  const AgeValue& age = config_.metric() == MetricKind::kAoii ? s.aoii : s.aoi_rx;
  rec.quality_cost = quality_cost(config_.got, s.x, s.x_rx, age);
  rec.energy_j = energy_cost(rec.phases, prof);
  rec.total_cost = total_cost(rec.energy_j, rec.quality_cost, config_.weights);
  strategy_->on_step_cost(rec.total_cost);

  ledger_.append(rec);
  ++t_;
  return rec;
}

void Simulator::run() {
  while (!done()) step();
}

CostLedger run_episode(const SimConfig& config, bool keep_records) {
  Simulator sim(config, keep_records);
  sim.run();
  return sim.ledger();
}

void write_ledger_csv(std::ostream& out, const CostLedger& ledger) {
  out << "step,energy_j,quality_cost,total_cost,slept,transmitted,acked,aoi_rx,aoii\n";
  std::ostringstream row;
  row.precision(12);
  for (const auto& r : ledger.records()) {
    row.str({});
    row << r.step << ',' << r.energy_j << ',' << r.quality_cost << ',' << r.total_cost << ','
        << int(r.slept) << ',' << int(r.transmitted) << ',' << int(r.acked) << ',' << r.aoi_rx
        << ',' << r.aoii << '\n';
    out << row.str();
  }
}

void write_ledger_csv(const std::filesystem::path& path, const CostLedger& ledger) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write ledger '" + path.string() + "'");
  write_ledger_csv(out, ledger);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

nlohmann::json summary_json(const CostLedger& ledger, const RngSeed& seed) {
  return {{"c_e", ledger.c_e()},
          {"c_qual", ledger.c_qual()},
          {"c_avg", ledger.c_avg()},
          {"steps", ledger.steps()},
          {"seed", seed.master_seed}};
}

}  // namespace sleepsched
