#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "groundwave/errors.hpp"
#include "groundwave_cli/config.hpp"

namespace groundwave::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitCalibration = 3,
  kExitRuntime = 4,
};

/// No calibration could be obtained for the scenario's surface.
class MissingCalibration : public Error {
 public:
  using Error::Error;
};

struct RunOptions {
  std::filesystem::path config;
  std::optional<PolicyKind> policy;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon_s;
  std::optional<std::filesystem::path> calibration;
  std::optional<std::filesystem::path> events;
  std::filesystem::path out_dir = ".";
};

/// Loads the config and applies the command-line overrides.
Config resolve_config(const RunOptions& opts);

/// Calibration from a report file when given, otherwise fitted inline from
/// the config's targets.
Calibration obtain_calibration(const Config& cfg, const std::optional<std::filesystem::path>& file);

/// "tilt_deg=0,10,20" -> {tilt_deg, {0, 10, 20}}. Throws InvalidArgument.
SweepAxis parse_axis(const std::string& spec);

int cmd_calibrate(const std::filesystem::path& config, const std::filesystem::path& out_file,
                  std::ostream& out);
int cmd_run(const RunOptions& opts, std::ostream& out);
int cmd_compare(const RunOptions& opts, std::ostream& out);
int cmd_sweep(const RunOptions& opts, const std::vector<std::string>& axes, bool parallel,
              std::ostream& out);
int cmd_trace(const RunOptions& opts, std::ostream& out);
int cmd_codebook(const std::filesystem::path& config, const std::string& side,
                 const std::optional<std::filesystem::path>& out_file, std::ostream& out);
int cmd_events(const RunOptions& opts, const std::filesystem::path& out_file, std::ostream& out);

/// Full command-line entry point; never throws, returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace groundwave::cli
