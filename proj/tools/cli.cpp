#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sleepsched/channel.hpp"
#include "sleepsched/config.hpp"
#include "sleepsched/errors.hpp"
#include "sleepsched/got.hpp"
#include "sleepsched/simulator.hpp"
#include "sleepsched/sweep.hpp"

namespace sleepsched {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::optional<std::uint64_t> seed;
  fs::path out_dir = ".";
  unsigned jobs = 0;
  bool quiet = false;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void emit_json(const nlohmann::json& doc, const std::string& output, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << doc.dump(2) << '\n';
    return;
  }
  std::ofstream f(output);
  if (!f) throw IoError("cannot write '" + output + "'");
  f << doc.dump(2) << '\n';
}

int cmd_run(const Globals& g, const std::string& config_path, bool write_ledger,
            Step t_final, std::ostream& out) {
  ExperimentConfig cfg = load_config(config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (t_final > 0) cfg.t_final = t_final;
  const RngSeed seed{cfg.seed, 0};
  const CostLedger ledger = run_episode(build_sim_config(cfg, seed), write_ledger);

  ensure_dir(g.out_dir);
  const nlohmann::json summary = summary_json(ledger, seed);
  emit_json(summary, (g.out_dir / "summary.json").string(), out);
  if (write_ledger) write_ledger_csv(g.out_dir / "ledger.csv", ledger);
  if (!g.quiet) out << summary.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& config_path, std::optional<int> repetitions,
              Step t_final, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_config(config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (t_final > 0) cfg.t_final = t_final;
  if (!cfg.sweep) throw ConfigError("sweep: config has no 'sweep' section");
  if (repetitions) {
    if (*repetitions < 1) throw ConfigError("--repetitions must be >= 1");
    cfg.sweep->repetitions = *repetitions;
  }
  const SweepSpec spec = SweepSpec::from_config(cfg);
  ProgressFn progress;
  if (!g.quiet)
    progress = [&err](std::size_t done, std::size_t total) {
      err << "\rsweep " << done << '/' << total << std::flush;
      if (done == total) err << '\n';
    };
  const auto rows = run_sweep(spec, g.jobs, progress);
  write_sweep_outputs(g.out_dir, spec, g.jobs, rows);
  if (!g.quiet) write_summary_csv(out, summarize(rows));
  return 0;
}

int cmd_fit_channel(const std::string& trace_path, double bin_ms, double erasure,
                    double feedback_erasure, const std::string& output, std::ostream& out) {
  const DelayTrace trace = read_delay_trace_csv(fs::path(trace_path));
  ChannelModel model;
  try {
    model = fit_channel_from_trace(trace, bin_ms, erasure, feedback_erasure);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fit-channel: ") + e.what());
  }
  emit_json(channel_to_json(model), output, out);
  return 0;
}

struct GotArgs {
  std::string kind = "a";
  std::size_t n_states = 8;
  int cap = 64;
  double alpha = 1.0;
  double beta = 0.001;
  double critical_below = 0.0;
  double v = 0.2;
  std::string output;
};

int cmd_gen_got(const Globals& g, const GotArgs& a, std::ostream& out) {
  ProcessConfig pc;
  pc.n_states = a.n_states;
  const ProcessModel process = build_process(pc);
  GotConfig gc;
  gc.kind = a.kind;
  gc.alpha = a.alpha;
  gc.beta = a.beta;
  gc.critical_below = a.critical_below;
  gc.variabilities = {a.v};
  if (a.kind == "a" && process.space.labels.empty())
    throw ConfigError("gen-got a: labels are only built in for 8 states");
  const GoTensor got = build_got(gc, process, a.cap, g.seed.value_or(1), 0);
  emit_json(got_to_json(got), a.output, out);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deep-sleep scheduling simulator and experiment harness", "sleepsched"};
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for sweeps (0 = all cores)");
  app.add_flag("--quiet", g.quiet, "Suppress progress and summaries on stdout");

  std::string config_path;
  bool no_ledger = false;
  Step t_final = 0;
  auto* run = app.add_subcommand("run", "Run a single episode");
  run->add_option("config", config_path, "Config file")->required();
  run->add_flag("--no-ledger", no_ledger, "Skip the per-step ledger CSV");
  run->add_option("--t-final", t_final, "Override the number of steps");

  int repetitions = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("config", config_path, "Config file with a sweep section")->required();
  sweep->add_option("--repetitions", repetitions, "Override the repetition count");
  sweep->add_option("--t-final", t_final, "Override the number of steps");

  std::string trace_path;
  double bin_ms = 20.0;
  double erasure = 0.0;
  double fb_erasure = 0.0;
  std::string output;
  auto* fit = app.add_subcommand("fit-channel", "Fit a Markov channel to a delay trace");
  fit->add_option("trace", trace_path, "CSV with header step,delay_ms")->required();
  fit->add_option("--bin-ms", bin_ms, "Delay bin width in ms")->capture_default_str();
  fit->add_option("--erasure", erasure, "Data erasure rate of every state")->capture_default_str();
  fit->add_option("--feedback-erasure", fb_erasure, "Feedback erasure rate")->capture_default_str();
  fit->add_option("--output,-o", output, "Output file (default stdout)");

  GotArgs ga;
  auto* gen = app.add_subcommand("gen-got", "Generate a cost tensor as JSON");
  gen->add_option("kind", ga.kind, "Tensor family")->required()->check(CLI::IsMember({"a", "b"}));
  gen->add_option("--n-states", ga.n_states, "Process states")->capture_default_str();
  gen->add_option("--cap", ga.cap, "Age cap M")->capture_default_str();
  gen->add_option("--alpha", ga.alpha, "Critical mismatch slope (a)")->capture_default_str();
  gen->add_option("--beta", ga.beta, "Other mismatch slope (a)")->capture_default_str();
  gen->add_option("--critical-below", ga.critical_below, "Critical label threshold (a)")
      ->capture_default_str();
  gen->add_option("--v", ga.v, "Variability (b)")->capture_default_str();
  gen->add_option("--output,-o", ga.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  if (app.count("--seed") > 0) g.seed = seed;
  g.out_dir = out_dir;

  try {
    if (*run) return cmd_run(g, config_path, !no_ledger, t_final, out);
    if (*sweep)
      return cmd_sweep(g, config_path,
                       repetitions > 0 ? std::optional<int>(repetitions) : std::nullopt,
                       t_final, out, err);
    if (*fit) return cmd_fit_channel(trace_path, bin_ms, erasure, fb_erasure, output, out);
    if (*gen) return cmd_gen_got(g, ga, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace sleepsched
