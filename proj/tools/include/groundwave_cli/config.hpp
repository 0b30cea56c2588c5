#pragma once

// JSON scenario configuration for the command-line tool.

#include <filesystem>
#include <string>

#include "groundwave/calibration.hpp"
#include "groundwave/simcore.hpp"

namespace groundwave::cli {

struct Config {
  ScenarioConfig scenario;
  CalibrationTargets targets = reference_targets();
  double max_residual_db = 3.0;

  /// Calibration setup implied by the scenario's geometry and codebooks.
  CalibrationSetup calibration_setup() const;

  bool operator==(const Config&) const = default;
};

/// Parses a config document. Unknown keys and wrongly typed values raise
/// FormatError; absent keys keep their defaults.
Config parse_config(const std::string& text);

/// Writes every key, so parse(serialize(c)) == c.
std::string serialize_config(const Config& cfg);

Config load_config(const std::filesystem::path& path);

}  // namespace groundwave::cli
