#pragma once

// Shared calibrated setup for the simulation-level tests.

#include "groundwave/calibration.hpp"
#include "groundwave/simcore.hpp"

namespace fixture {

inline groundwave::CalibrationSetup reference_setup() {
  groundwave::CalibrationSetup s;
  s.geom = groundwave::SiteGeometry{2.5, 1.0, 6.0, 0.0};
  s.rx_spec.el_beamwidth_deg = 36.0;
  s.rx_spec.elevation_rows_deg = {-30.0, 0.0, 30.0};
  return s;
}

inline const groundwave::Calibration& reference_calibration() {
  static const groundwave::Calibration cal = groundwave::calibrate(
      groundwave::LinkBudget{}, reference_setup(), groundwave::reference_targets());
  return cal;
}

}  // namespace fixture
