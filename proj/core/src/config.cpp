#include "sleepsched/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sleepsched/errors.hpp"
#include "sleepsched/got.hpp"

namespace sleepsched {

using nlohmann::json;

namespace {

// Tracks which keys of one JSON object were consumed so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return read<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(key_path(key) + ": missing required key");
    return read<T>(key);
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), key_path(key));
  }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.contains(k)) throw ConfigError(key_path(k) + ": unknown key");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  template <typename T>
  T read(const std::string& key) {
    seen_.insert(key);
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(key_path(key) + ": expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
      if (std::is_unsigned_v<T> && v.is_number_integer() && v.get<long long>() < 0 &&
          !v.is_number_unsigned())
        throw ConfigError(key_path(key) + ": expected a nonnegative integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
    }
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(key_path(key) + ": value has the wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ConfigError(path + ": " + msg);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

ProcessConfig parse_process(Section s) {
  ProcessConfig c;
  c.kind = s.get<std::string>("kind", c.kind);
  check(c.kind == "adjacent" || c.kind == "matrix", s.key_path("kind"),
        "expected 'adjacent' or 'matrix'");
  c.labels = s.get<std::vector<double>>("labels", {});
  if (c.kind == "adjacent") {
    c.n_states = s.get<std::size_t>("n_states", c.n_states);
    c.p_change = s.get<double>("p_change", c.p_change);
    check(c.n_states >= 2, s.key_path("n_states"), "must be >= 2");
    check(is_probability(c.p_change), s.key_path("p_change"), "must lie in [0, 1]");
  } else {
    c.transitions = s.require<std::vector<std::vector<double>>>("transitions");
    c.n_states = c.transitions.size();
    check(c.n_states >= 2, s.key_path("transitions"), "needs at least two rows");
  }
  check(c.labels.empty() || c.labels.size() == c.n_states, s.key_path("labels"),
        "needs one label per state");
  s.finish();
  return c;
}

ChannelConfig parse_channel(Section s, const std::filesystem::path& base) {
  ChannelConfig c;
  c.kind = s.get<std::string>("kind", c.kind);
  check(c.kind == "synthetic" || c.kind == "trace" || c.kind == "chain", s.key_path("kind"),
        "expected 'synthetic', 'trace' or 'chain'");
  if (c.kind != "synthetic") c.path = resolve(base, s.require<std::string>("path"));
  c.bin_ms = s.get<double>("bin_ms", c.bin_ms);
  c.data_erasure = s.get<double>("data_erasure", c.data_erasure);
  c.feedback_erasure = s.get<double>("feedback_erasure", c.feedback_erasure);
  check(c.bin_ms > 0.0, s.key_path("bin_ms"), "must be positive");
  check(is_probability(c.data_erasure), s.key_path("data_erasure"), "must lie in [0, 1]");
  check(is_probability(c.feedback_erasure), s.key_path("feedback_erasure"), "must lie in [0, 1]");
  s.finish();
  return c;
}

GotConfig parse_got(Section s, const std::filesystem::path& base) {
  GotConfig c;
  c.kind = s.get<std::string>("kind", c.kind);
  check(c.kind == "a" || c.kind == "b" || c.kind == "file", s.key_path("kind"),
        "expected 'a', 'b' or 'file'");
  const std::string metric = s.get<std::string>("metric", std::string(to_string(c.metric)));
  try {
    c.metric = metric_kind_from_string(metric);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.key_path("metric") + ": " + e.what());
  }
  if (c.kind == "a") {
    c.critical_below = s.get<double>("critical_below", c.critical_below);
    c.alpha = s.get<double>("alpha", c.alpha);
    c.beta = s.get<double>("beta", c.beta);
    check(c.alpha > c.beta && c.beta > 0.0, s.key_path("alpha"), "requires alpha > beta > 0");
  } else if (c.kind == "b") {
    if (s.has("v")) c.variabilities = {s.get<double>("v", 0.0)};
    c.variabilities = s.get<std::vector<double>>("variabilities", c.variabilities);
    check(!c.variabilities.empty(), s.key_path("variabilities"), "must not be empty");
    for (double v : c.variabilities)
      check(v > 0.0 && v <= 0.5, s.key_path("variabilities"), "entries must lie in (0, 0.5]");
  } else {
    c.path = resolve(base, s.require<std::string>("path"));
  }
  s.finish();
  return c;
}

EnergyProfile parse_energy(Section s) {
  EnergyProfile e;
  e.p_wake = s.get<double>("p_wake", e.p_wake);
  e.p_sense = s.get<double>("p_sense", e.p_sense);
  e.p_antenna = s.get<double>("p_antenna", e.p_antenna);
  e.p_idle = s.get<double>("p_idle", e.p_idle);
  e.p_deep_sleep = s.get<double>("p_deep_sleep", e.p_deep_sleep);
  e.t_wake = s.get<double>("t_wake", e.t_wake);
  e.t_sense = s.get<double>("t_sense", e.t_sense);
  e.t_tx = s.get<double>("t_tx", e.t_tx);
  e.step = s.get<double>("step", e.step);
  s.finish();
  try {
    e.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("energy: ") + ex.what());
  }
  return e;
}

CostWeights parse_weights(Section s) {
  CostWeights w;
  w.w_energy = s.get<double>("w_e", w.w_energy);
  w.w_quality = s.get<double>("w_qual", w.w_quality);
  s.finish();
  try {
    w.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("weights: ") + ex.what());
  }
  return w;
}

QLearningParams parse_qlearn(Section s) {
  QLearningParams q;
  q.learning_rate = s.get<double>("learning_rate", q.learning_rate);
  q.discount = s.get<double>("discount", q.discount);
  q.epsilon_start = s.get<double>("epsilon_start", q.epsilon_start);
  q.epsilon_end = s.get<double>("epsilon_end", q.epsilon_end);
  q.decay_fraction = s.get<double>("decay_fraction", q.decay_fraction);
  q.actions = s.get<std::vector<int>>("actions", q.actions);
  q.age_buckets = s.get<std::vector<int>>("age_buckets", q.age_buckets);
  check(q.learning_rate > 0.0 && q.learning_rate <= 1.0, s.key_path("learning_rate"),
        "must lie in (0, 1]");
  check(q.discount >= 0.0 && q.discount < 1.0, s.key_path("discount"), "must lie in [0, 1)");
  check(is_probability(q.epsilon_start), s.key_path("epsilon_start"), "must lie in [0, 1]");
  check(is_probability(q.epsilon_end), s.key_path("epsilon_end"), "must lie in [0, 1]");
  check(q.decay_fraction > 0.0, s.key_path("decay_fraction"), "must be positive");
  check(!q.actions.empty(), s.key_path("actions"), "must not be empty");
  s.finish();
  return q;
}

StrategySpec parse_strategy(Section s) {
  StrategySpec st;
  st.id = s.get<std::string>("id", st.id);
  const auto& ids = strategy_ids();
  check(std::find(ids.begin(), ids.end(), st.id) != ids.end(), s.key_path("id"),
        "unknown strategy '" + st.id + "'");
  st.psbo.max_sleep = s.get<int>("max_sleep", st.psbo.max_sleep);
  st.psbo.max_tx_steps = s.get<int>("max_tx_steps", st.psbo.max_tx_steps);
  st.psbo.t_listen = s.get<double>("t_listen", st.psbo.t_listen);
  st.random_min = s.get<int>("random_min", st.random_min);
  st.random_max = s.get<int>("random_max", st.random_max);
  st.force_transmit = s.get<bool>("force_transmit", st.force_transmit);
  if (s.has("qlearn")) st.qlearn = parse_qlearn(s.sub("qlearn"));
  check(st.psbo.max_sleep >= 1, s.key_path("max_sleep"), "must be >= 1");
  check(st.psbo.max_tx_steps >= 1, s.key_path("max_tx_steps"), "must be >= 1");
  check(st.random_min >= 0 && st.random_max >= st.random_min, s.key_path("random_min"),
        "requires 0 <= random_min <= random_max");
  s.finish();
  return st;
}

SweepConfig parse_sweep(Section s) {
  SweepConfig c;
  const std::string name = s.require<std::string>("parameter");
  try {
    c.parameter = sweep_parameter_from_string(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.key_path("parameter") + ": " + e.what());
  }
  c.values = s.get<std::vector<double>>("values", default_sweep_values(c.parameter));
  c.strategies = s.get<std::vector<std::string>>("strategies", strategy_ids());
  c.repetitions = s.get<int>("repetitions", c.repetitions);
  check(!c.values.empty(), s.key_path("values"), "must not be empty");
  check(!c.strategies.empty(), s.key_path("strategies"), "must not be empty");
  check(c.repetitions >= 1, s.key_path("repetitions"), "must be >= 1");
  const auto& ids = strategy_ids();
  for (const auto& id : c.strategies)
    check(std::find(ids.begin(), ids.end(), id) != ids.end(), s.key_path("strategies"),
          "unknown strategy '" + id + "'");
  for (double v : c.values) {
    if (c.parameter == SweepParameter::kEnergyWeight)
      check(v >= 0.0, s.key_path("values"), "energy weights must be nonnegative");
    else
      check(is_probability(v), s.key_path("values"), "values must lie in [0, 1]");
  }
  s.finish();
  return c;
}

}  // namespace

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kDataErasure: return "data_erasure";
    case SweepParameter::kEnergyWeight: return "energy_weight";
    case SweepParameter::kStateChangeRate: return "state_change_rate";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(std::string_view name) {
  if (name == "data_erasure") return SweepParameter::kDataErasure;
  if (name == "energy_weight") return SweepParameter::kEnergyWeight;
  if (name == "state_change_rate") return SweepParameter::kStateChangeRate;
  throw std::invalid_argument("unknown sweep parameter '" + std::string(name) +
                              "' (expected data_erasure, energy_weight or state_change_rate)");
}

std::vector<double> default_sweep_values(SweepParameter p) {
  std::vector<double> v;
  switch (p) {
    case SweepParameter::kDataErasure:
      v = {0.0, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99};
      break;
    case SweepParameter::kEnergyWeight:
      for (int e = -3; e <= 5; ++e) v.push_back(std::ldexp(1.0, e));
      break;
    case SweepParameter::kStateChangeRate:
      for (int e = -9; e <= -2; ++e) v.push_back(std::ldexp(1.0, e));
      break;
  }
  return v;
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  Section root(doc, "");
  c.seed = root.get<std::uint64_t>("seed", c.seed);
  c.t_final = root.get<Step>("t_final", c.t_final);
  c.cap = root.get<int>("cap", c.cap);
  c.count_prior = root.get<double>("count_prior", c.count_prior);
  check(c.t_final >= 1, "t_final", "must be >= 1");
  check(c.cap >= 1, "cap", "must be >= 1");
  check(c.count_prior >= 0.0, "count_prior", "must be nonnegative");
  if (root.has("process")) c.process = parse_process(root.sub("process"));
  if (root.has("channel")) c.channel = parse_channel(root.sub("channel"), base_dir);
  if (root.has("got")) c.got = parse_got(root.sub("got"), base_dir);
  if (root.has("energy")) c.energy = parse_energy(root.sub("energy"));
  if (root.has("weights")) c.weights = parse_weights(root.sub("weights"));
  if (root.has("strategy")) c.strategy = parse_strategy(root.sub("strategy"));
  if (root.has("sweep")) c.sweep = parse_sweep(root.sub("sweep"));
  root.finish();
  if (c.sweep && c.sweep->parameter == SweepParameter::kStateChangeRate)
    check(c.process.kind == "adjacent", "sweep.parameter",
          "state_change_rate sweeps need an adjacent process");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  json process = {{"kind", c.process.kind}};
  if (c.process.kind == "adjacent") {
    process["n_states"] = c.process.n_states;
    process["p_change"] = c.process.p_change;
  } else {
    process["transitions"] = c.process.transitions;
  }
  if (!c.process.labels.empty()) process["labels"] = c.process.labels;

  json channel = {{"kind", c.channel.kind},
                  {"bin_ms", c.channel.bin_ms},
                  {"data_erasure", c.channel.data_erasure},
                  {"feedback_erasure", c.channel.feedback_erasure}};
  if (c.channel.kind != "synthetic") channel["path"] = c.channel.path.string();

  json got = {{"kind", c.got.kind}, {"metric", std::string(to_string(c.got.metric))}};
  if (c.got.kind == "a") {
    got["critical_below"] = c.got.critical_below;
    got["alpha"] = c.got.alpha;
    got["beta"] = c.got.beta;
  } else if (c.got.kind == "b") {
    got["variabilities"] = c.got.variabilities;
  } else {
    got["path"] = c.got.path.string();
  }

  const auto& e = c.energy;
  const auto& q = c.strategy.qlearn;
  json doc = {
      {"seed", c.seed},
      {"t_final", c.t_final},
      {"cap", c.cap},
      {"count_prior", c.count_prior},
      {"process", process},
      {"channel", channel},
      {"got", got},
      {"energy",
       {{"p_wake", e.p_wake}, {"p_sense", e.p_sense}, {"p_antenna", e.p_antenna},
        {"p_idle", e.p_idle}, {"p_deep_sleep", e.p_deep_sleep}, {"t_wake", e.t_wake},
        {"t_sense", e.t_sense}, {"t_tx", e.t_tx}, {"step", e.step}}},
      {"weights", {{"w_e", c.weights.w_energy}, {"w_qual", c.weights.w_quality}}},
      {"strategy",
       {{"id", c.strategy.id},
        {"max_sleep", c.strategy.psbo.max_sleep},
        {"max_tx_steps", c.strategy.psbo.max_tx_steps},
        {"t_listen", c.strategy.psbo.t_listen},
        {"random_min", c.strategy.random_min},
        {"random_max", c.strategy.random_max},
        {"force_transmit", c.strategy.force_transmit},
        {"qlearn",
         {{"learning_rate", q.learning_rate}, {"discount", q.discount},
          {"epsilon_start", q.epsilon_start}, {"epsilon_end", q.epsilon_end},
          {"decay_fraction", q.decay_fraction}, {"actions", q.actions},
          {"age_buckets", q.age_buckets}}}}}};
  if (c.sweep)
    doc["sweep"] = {{"parameter", std::string(to_string(c.sweep->parameter))},
                    {"values", c.sweep->values},
                    {"strategies", c.sweep->strategies},
                    {"repetitions", c.sweep->repetitions}};
  return doc;
}

ProcessModel build_process(const ProcessConfig& cfg) {
  ProcessModel m;
  try {
    if (cfg.kind == "adjacent")
      m.chain = adjacent_state_process(cfg.n_states, cfg.p_change);
    else
      m.chain = MarkovChain(RowMatrix::from_rows(cfg.transitions));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("process: ") + e.what());
  }
  m.space.n_states = m.chain.n_states();
  if (!cfg.labels.empty())
    m.space.labels = cfg.labels;
  else if (m.space.n_states == 8)
    m.space.labels = temperature_space().labels;
  return m;
}

ChannelModel build_channel(const ChannelConfig& cfg) {
  try {
    if (cfg.kind == "synthetic") return synthetic_leo_channel(cfg.data_erasure, cfg.feedback_erasure);
    if (cfg.kind == "trace")
      return fit_channel_from_trace(read_delay_trace_csv(cfg.path), cfg.bin_ms, cfg.data_erasure,
                                    cfg.feedback_erasure);
    std::ifstream in(cfg.path);
    if (!in) throw IoError("cannot open channel chain '" + cfg.path.string() + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("channel chain '" + cfg.path.string() + "': " + e.what());
    }
    return with_erasure(channel_from_json(doc, cfg.feedback_erasure), cfg.data_erasure,
                        cfg.feedback_erasure);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  }
}

GoTensor build_got(const GotConfig& cfg, const ProcessModel& process, int cap,
                   std::uint64_t master_seed, int repetition) {
  try {
    GoTensor got;
    if (cfg.kind == "a") {
      if (process.space.labels.empty())
        throw ConfigError("got: GoT-A needs process labels to find critical states");
      got = make_got_a(process.space, states_below(process.space, cfg.critical_below), cfg.alpha,
                       cfg.beta, cap);
    } else if (cfg.kind == "b") {
      const std::size_t k = static_cast<std::size_t>(repetition) % cfg.variabilities.size();
      // Tag 0x60b keeps GoT draws apart from episode streams.
      RngSeed seed{derive_seed(master_seed, {0x60b, k}), 0};
      Rng rng = make_rng(seed);
      got = make_got_b(process.space, cfg.variabilities[k], cap, rng).got;
    } else {
      std::ifstream in(cfg.path);
      if (!in) throw IoError("cannot open GoT file '" + cfg.path.string() + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("GoT file '" + cfg.path.string() + "': " + e.what());
      }
      got = got_from_json(doc);
      if (got.cap() != cap) throw ConfigError("got: file cap differs from the configured cap");
    }
    if (cfg.kind != "file") got.metric = cfg.metric;
    if (got.n_states() != process.space.n_states)
      throw ConfigError("got: tensor size does not match the process state count");
    return got;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("got: ") + e.what());
  }
}

SimConfig build_sim_config(const ExperimentConfig& cfg, const RngSeed& seed, int repetition) {
  SimConfig s;
  s.process = build_process(cfg.process);
  s.channel = build_channel(cfg.channel);
  s.got = build_got(cfg.got, s.process, cfg.cap, cfg.seed, repetition);
  s.profile = cfg.energy;
  s.weights = cfg.weights;
  s.t_final = cfg.t_final;
  s.strategy = cfg.strategy;
  s.seed = seed;
  s.count_prior = cfg.count_prior;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace sleepsched
