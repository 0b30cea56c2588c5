#include "groundwave_cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "groundwave/report.hpp"

namespace groundwave::cli {
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw Error("cannot write " + path.string());
  }
  os << content;
  if (!os) {
    throw Error("failed while writing " + path.string());
  }
  spdlog::debug("wrote {}", path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string summary_line(const RunMetrics& m) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << to_string(m.policy) << ": outage " << m.total_outage_ms << " ms, measurements "
     << m.measurements_total() << ", survived " << m.n_events_survived << '/'
     << m.n_blockage_events << " events";
  if (m.grd_impossible) {
    os << " (GRD impossible)";
  }
  return os.str();
}

ScenarioConfig scenario_for(const Config& cfg, const RunOptions& opts) {
  ScenarioConfig sc = cfg.scenario;
  if (opts.events) {
    sc.events = events_from_csv(read_file(*opts.events));
  }
  return sc;
}

void configure_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("groundwave");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  });
  const char* env = std::getenv("GROUNDWAVE_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

Config resolve_config(const RunOptions& opts) {
  Config cfg = load_config(opts.config);
  if (opts.policy) {
    cfg.scenario.policy = *opts.policy;
  }
  if (opts.seed) {
    cfg.scenario.seed = *opts.seed;
  }
  if (opts.horizon_s) {
    cfg.scenario.horizon_ms = *opts.horizon_s * 1000.0;
  }
  return cfg;
}

Calibration obtain_calibration(const Config& cfg, const std::optional<fs::path>& file) {
  Calibration cal;
  if (file) {
    cal = calibration_from_json(read_file(*file));
    spdlog::info("loaded calibration from {}", file->string());
  } else if (!cfg.targets.gr.empty()) {
    cal = calibrate(cfg.scenario.budget, cfg.calibration_setup(), cfg.targets);
    spdlog::info("inline calibration: system loss {:.3f} dB, max residual {:.3f} dB",
                 cal.system_loss_db, cal.max_abs_residual_db());
  } else {
    throw MissingCalibration(
        "no calibration available: run `groundwave calibrate` and pass --calibration, or add "
        "calibration.gr_targets to the config");
  }
  if (!cal.has_surface(cfg.scenario.surface)) {
    throw MissingCalibration(std::string("calibration does not cover surface ") +
                             to_string(cfg.scenario.surface) + "; rerun `groundwave calibrate`");
  }
  return cal;
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size()) {
    throw InvalidArgument("sweep axis must look like name=v1,v2,...: '" + spec + "'");
  }
  SweepAxis axis;
  axis.parameter = spec.substr(0, eq);
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      axis.values.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad sweep value '" + item + "' for " + axis.parameter);
    }
  }
  return axis;
}

int cmd_calibrate(const fs::path& config, const fs::path& out_file, std::ostream& out) {
  const Config cfg = load_config(config);
  try {
    const Calibration cal = calibrate(cfg.scenario.budget, cfg.calibration_setup(), cfg.targets);
    write_file(out_file, calibration_to_json(cal));
    out << std::fixed << std::setprecision(3) << "calibrated: system loss " << cal.system_loss_db
        << " dB, max residual " << cal.max_abs_residual_db() << " dB -> " << out_file.string()
        << '\n';
    return kExitOk;
  } catch (const CalibrationError& e) {
    write_file(out_file, calibration_to_json(e.report()));
    throw;
  }
}

int cmd_run(const RunOptions& opts, std::ostream& out) {
  const Config cfg = resolve_config(opts);
  const Calibration cal = obtain_calibration(cfg, opts.calibration);
  ScenarioConfig sc = scenario_for(cfg, opts);
  sc.record_trace = true;
  const RunMetrics m = run(sc, cal);
  write_file(opts.out_dir / "metrics.csv", metrics_to_csv({m}));
  write_file(opts.out_dir / "trace.csv", trace_to_csv(m));
  write_file(opts.out_dir / "outcomes.csv", event_outcomes_to_csv(m));
  out << summary_line(m) << '\n';
  return kExitOk;
}

int cmd_compare(const RunOptions& opts, std::ostream& out) {
  const Config cfg = resolve_config(opts);
  const Calibration cal = obtain_calibration(cfg, opts.calibration);
  const ScenarioConfig base = scenario_for(cfg, opts);
  // One event trace shared by every policy.
  const Scenario reference = build_scenario(base, cal);
  std::vector<RunMetrics> runs;
  std::vector<PolicyReport> rows;
  for (PolicyKind p : kAllPolicies) {
    ScenarioConfig sc = base;
    sc.policy = p;
    sc.events = reference.events;
    runs.push_back(run(sc, cal));
    rows.push_back(make_report(runs.back()));
    out << summary_line(runs.back()) << '\n';
  }
  write_file(opts.out_dir / "comparison.csv", comparison_to_csv(rows));
  write_file(opts.out_dir / "metrics.csv", metrics_to_csv(runs));
  return kExitOk;
}

int cmd_sweep(const RunOptions& opts, const std::vector<std::string>& axes, bool parallel,
              std::ostream& out) {
  const Config cfg = resolve_config(opts);
  const Calibration cal = obtain_calibration(cfg, opts.calibration);
  std::vector<SweepAxis> grid;
  for (const auto& a : axes) {
    grid.push_back(parse_axis(a));
  }
  const auto points = sweep(scenario_for(cfg, opts), cal, grid, parallel);
  write_file(opts.out_dir / "sweep.csv", sweep_to_csv(points, grid));
  out << "sweep: " << points.size() << " runs -> " << (opts.out_dir / "sweep.csv").string() << '\n';
  return kExitOk;
}

int cmd_trace(const RunOptions& opts, std::ostream& out) {
  const Config cfg = resolve_config(opts);
  const Calibration cal = obtain_calibration(cfg, opts.calibration);
  ScenarioConfig sc = scenario_for(cfg, opts);
  sc.policy = PolicyKind::GroundReflection;
  sc.record_trace = true;
  sc.record_transitions = true;
  const RunMetrics m = run(sc, cal);
  write_file(opts.out_dir / "transitions.csv", transitions_to_csv(m.transitions));
  write_file(opts.out_dir / "trace.csv", trace_to_csv(m));
  out << m.transitions.size() << " transitions -> "
      << (opts.out_dir / "transitions.csv").string() << '\n';
  return kExitOk;
}

int cmd_codebook(const fs::path& config, const std::string& side,
                 const std::optional<fs::path>& out_file, std::ostream& out) {
  const Config cfg = load_config(config);
  const ScenarioConfig& sc = cfg.scenario;
  std::string text;
  if (side == "tx") {
    text = codebook_to_json(tilted_tx_codebook(sc.tx_codebook, sc.geom.tilt_tx_deg));
  } else if (side == "rx") {
    text = codebook_to_json(facing_rx_codebook(sc.rx_codebook, sc.geom));
  } else {
    throw InvalidArgument("codebook side must be tx or rx");
  }
  if (out_file) {
    write_file(*out_file, text);
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_events(const RunOptions& opts, const fs::path& out_file, std::ostream& out) {
  const Config cfg = resolve_config(opts);
  Rng rng(cfg.scenario.seed);
  const auto events =
      generate_events(cfg.scenario.horizon_ms, cfg.scenario.blockage, cfg.scenario.geom, rng);
  write_file(out_file, events_to_csv(events));
  out << events.size() << " events -> " << out_file.string() << '\n';
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"groundwave: 60 GHz ground-reflection blockage recovery simulator"};
  app.require_subcommand(1);

  RunOptions opts;
  std::string policy;
  std::string calibration_out = "calibration.json";
  std::string codebook_side = "rx";
  std::string single_out;
  std::vector<std::string> axes;
  bool sequential = false;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("config", opts.config, "JSON config file")->required()->check(CLI::ExistingFile);
  };
  auto add_run_flags = [&](CLI::App* cmd) {
    add_config(cmd);
    cmd->add_option("--policy", policy, "gr | exhaustive | scan-model | handover")
        ->check(CLI::IsMember({"gr", "exhaustive", "scan-model", "handover"}));
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--horizon-s", opts.horizon_s, "simulated horizon in seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--calibration", opts.calibration, "calibration report from `calibrate`")
        ->check(CLI::ExistingFile);
    cmd->add_option("--events", opts.events, "replay a blockage event CSV")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "output directory");
  };

  auto* calibrate_cmd = app.add_subcommand("calibrate", "fit system and reflection losses");
  add_config(calibrate_cmd);
  calibrate_cmd->add_option("--out", calibration_out, "report file");

  auto* run_cmd = app.add_subcommand("run", "simulate one policy");
  add_run_flags(run_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "simulate every policy on one event trace");
  add_run_flags(compare_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "cartesian parameter sweep");
  add_run_flags(sweep_cmd);
  sweep_cmd->add_option("--vary", axes, "axis as name=v1,v2,... (repeatable)")->required();
  sweep_cmd->add_flag("--sequential", sequential, "run grid points one after another");
  auto* trace_cmd = app.add_subcommand("trace", "export protocol state transitions");
  add_run_flags(trace_cmd);
  auto* codebook_cmd = app.add_subcommand("codebook", "dump a codebook as JSON");
  add_config(codebook_cmd);
  codebook_cmd->add_option("--side", codebook_side, "tx or rx")
      ->check(CLI::IsMember({"tx", "rx"}));
  codebook_cmd->add_option("--out", single_out, "output file (default: stdout)");
  auto* events_cmd = app.add_subcommand("events", "export the blockage event trace");
  add_config(events_cmd);
  events_cmd->add_option("--seed", opts.seed, "RNG seed");
  events_cmd->add_option("--horizon-s", opts.horizon_s, "horizon in seconds")
      ->check(CLI::PositiveNumber);
  events_cmd->add_option("--out", single_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  if (!policy.empty()) {
    opts.policy = policy_from_string(policy);
  }

  try {
    if (*calibrate_cmd) return cmd_calibrate(opts.config, calibration_out, out);
    if (*run_cmd) return cmd_run(opts, out);
    if (*compare_cmd) return cmd_compare(opts, out);
    if (*sweep_cmd) return cmd_sweep(opts, axes, !sequential, out);
    if (*trace_cmd) return cmd_trace(opts, out);
    if (*codebook_cmd) {
      std::optional<fs::path> target;
      if (!single_out.empty()) target = single_out;
      return cmd_codebook(opts.config, codebook_side, target, out);
    }
    if (*events_cmd) return cmd_events(opts, single_out, out);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CalibrationError& e) {
    err << "calibration failed: " << e.what() << '\n';
    return kExitCalibration;
  } catch (const MissingCalibration& e) {
    err << "error: " << e.what() << '\n';
    return kExitCalibration;
  } catch (const std::exception& e) {
    err << "fault: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace groundwave::cli
