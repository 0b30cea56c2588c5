#pragma once

// Ray geometry for an elevated transmitter facing a ground-level receiver.
//
// Coordinates live in the vertical plane through both arrays. Horizontal
// stations are measured from the receiver towards the transmitter; heights
// are measured from the ground plane (z = 0). The ground-reflected ray is
// built with the image-source method: mirror the transmitter through the
// ground and draw a straight line to the receiver.

#include <optional>

namespace groundwave {

/// Standing-pedestrian defaults.
inline constexpr double kDefaultBlockerHeight = 1.78;  // m
inline constexpr double kDefaultBlockerWidth = 0.5;    // m
/// Hip height as a fraction of stature. Below it the legs are treated as
/// transparent to the narrow mm-wave beam.
inline constexpr double kHipHeightRatio = 0.53;

struct SiteGeometry {
  double h_tx_m = 2.5;
  double h_rx_m = 1.0;
  double d_tr_m = 6.0;
  double tilt_tx_deg = 0.0;  // downward tilt of the transmit array, >= 0

  /// Throws InvalidGeometry unless h_tx > h_rx > 0, d_tr > 0 and 0 <= tilt < 90.
  void validate() const;

  bool operator==(const SiteGeometry&) const = default;
};

/// A pedestrian modeled as an opaque vertical rectangle standing across the
/// Tx-Rx line. The opaque part spans [opaque_base(), height_m].
struct Blocker {
  double height_m = kDefaultBlockerHeight;
  double distance_from_rx_m = 0.0;
  double azimuth_offset_m = 0.0;  // lateral offset from the LoS vertical plane
  double width_m = kDefaultBlockerWidth;
  std::optional<double> opaque_base_m;  // defaults to hip height

  double opaque_base() const { return opaque_base_m.value_or(kHipHeightRatio * height_m); }

  void validate() const;

  bool operator==(const Blocker&) const = default;
};

enum class PathKind { LoS, GroundReflection, NLoS };

const char* to_string(PathKind kind);

struct RayPath {
  PathKind kind = PathKind::LoS;
  double length_m = 0.0;
  double departure_elevation_deg = 0.0;  // at Tx, negative = below horizontal
  double arrival_elevation_deg = 0.0;    // at Rx, negative = arriving from below
  double departure_azimuth_deg = 0.0;    // Tx frame, 0 = towards the receiver
  double arrival_azimuth_deg = 0.0;      // Rx frame, 0 = towards the transmitter
  std::optional<double> reflection_point_m;  // horizontal distance from Tx
  double excess_loss_db = 0.0;               // scatterer loss for synthetic paths

  bool operator==(const RayPath&) const = default;
};

/// Largest receiver-to-blocker distance at which a blocker of the given
/// height still cuts the direct ray: D_TR * (H_B - H_R) / (H_T - H_R).
/// Clamped to [0, d_tr] for blockers shorter than the receiver or taller
/// than the transmitter.
double blocker_reach(const SiteGeometry& geom, double blocker_height_m);

RayPath los_path(const SiteGeometry& geom);

/// Specular ground bounce via the image source at -h_tx.
RayPath ground_reflection_path(const SiteGeometry& geom);

/// A synthetic environmental (wall, lamppost) path. It leaves the transmitter
/// along the direct ray, travels the LoS distance and reaches the receiver at
/// the LoS elevation but from `arrival_azimuth_deg`; `excess_loss_db` sets how
/// far below LoS it sits with aligned beams.
RayPath nlos_path(const SiteGeometry& geom, double arrival_azimuth_deg, double excess_loss_db);

/// Height of `path` above ground at a horizontal station `distance_from_rx_m`
/// along its own azimuth projection onto the Tx-Rx line.
double ray_height_at(const SiteGeometry& geom, const RayPath& path, double distance_from_rx_m);

/// True when the blocker's opaque rectangle intersects `path`.
bool is_blocked(const SiteGeometry& geom, const RayPath& path, const Blocker& blocker);

}  // namespace groundwave
