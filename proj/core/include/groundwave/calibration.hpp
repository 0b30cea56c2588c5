#pragma once

// Fits the two free link-budget constants (system loss, per-surface
// reflection loss) to measured RSS anchors.

#include <map>
#include <string>
#include <vector>

#include "groundwave/antenna.hpp"
#include "groundwave/channel.hpp"
#include "groundwave/errors.hpp"
#include "groundwave/geometry.hpp"

namespace groundwave {

/// One measured ground-reflection reading, taken with the LoS blocked by a
/// pedestrian standing `d_br_m` from the receiver.
struct GrTarget {
  Surface surface = Surface::OutdoorConcrete;
  double tilt_deg = 0.0;
  double d_br_m = 2.0;
  double rss_dbm = -64.0;

  bool operator==(const GrTarget&) const = default;
};

struct CalibrationTargets {
  double rss_los_dbm = -60.0;
  std::vector<GrTarget> gr;

  bool operator==(const CalibrationTargets&) const = default;
};

/// The eighteen ground-reflection readings of the reference measurement
/// campaign (three surfaces, tilts 0/10/20 degrees, blocker at 2 and 3 m).
CalibrationTargets reference_targets();

/// How the predicted GR reading for a target row is formed.
enum class BeamAlignment {
  Codebook,   // B_TL on the tilted Tx codebook, best Rx beam in the B_RL column
  Boresight,  // ideal beams pointed exactly along the path
};

struct CalibrationSetup {
  SiteGeometry geom;  // tilt is taken from each target row
  CodebookSpec tx_spec;
  CodebookSpec rx_spec;
  double blocker_height_m = kDefaultBlockerHeight;
  BeamAlignment alignment = BeamAlignment::Codebook;
  double max_residual_db = 3.0;

  bool operator==(const CalibrationSetup&) const = default;
};

/// Transmit codebook with the array rotated down by `tilt_deg`.
Codebook tilted_tx_codebook(const CodebookSpec& spec, double tilt_deg);

/// Receive codebook. Rows in `spec` are relative to a boresight that looks
/// back at the transmitter (raised by the LoS elevation); the spec's own
/// elevation_offset_deg is added on top.
Codebook facing_rx_codebook(const CodebookSpec& spec, const SiteGeometry& geom);

struct CalibrationRow {
  GrTarget target;
  double predicted_dbm = 0.0;
  double residual_db = 0.0;  // predicted - measured
};

struct Calibration {
  double rss_los_dbm = -60.0;
  double system_loss_db = 0.0;
  std::map<Surface, double> reflection_loss_db;
  std::vector<CalibrationRow> rows;

  double max_abs_residual_db() const;
  bool has_surface(Surface s) const { return reflection_loss_db.count(s) != 0; }
  /// Throws ScenarioFault when the surface was not calibrated.
  SurfaceProfile profile(Surface s) const;
  LinkBudget apply(LinkBudget budget) const;
};

/// Raised when some row cannot be fitted within the residual gate. The
/// partially filled calibration is kept so it can still be reported.
class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, Calibration report)
      : Error(what), report_(std::move(report)) {}
  const Calibration& report() const { return report_; }

 private:
  Calibration report_;
};

/// System loss makes boresight-aligned LoS beams read exactly rss_los_dbm.
/// Each surface's reflection loss minimizes the mean absolute residual over
/// its rows (ties resolved towards the smallest worst-case residual) and is
/// clamped at 0 dB.
Calibration calibrate(const LinkBudget& budget, const CalibrationSetup& setup,
                      const CalibrationTargets& targets);

/// Noise-free GR reading the model predicts for one target row, using the
/// calibrated budget and surface.
double predict_gr(const LinkBudget& calibrated_budget, const SurfaceProfile& surface,
                  const CalibrationSetup& setup, double tilt_deg, double d_br_m);

std::string calibration_to_json(const Calibration& cal);
Calibration calibration_from_json(const std::string& text);

}  // namespace groundwave
