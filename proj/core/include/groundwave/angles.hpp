#pragma once

#include <numbers>

namespace groundwave {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }

/// Converts radians to degrees, snapping results within 1e-9 of a whole
/// degree so that round trips through radians are exact at 0/30/45/90.
double rad_to_deg(double rad);

/// Wraps an angle into (-180, 180].
double wrap_degrees(double deg);

}  // namespace groundwave
