#include "groundwave/geometry.hpp"

#include <cmath>

#include "groundwave/angles.hpp"
#include "groundwave/errors.hpp"

namespace groundwave {

void SiteGeometry::validate() const {
  if (!(h_rx_m > 0.0)) {
    throw InvalidGeometry("receiver height must be positive");
  }
  if (!(h_tx_m > h_rx_m)) {
    throw InvalidGeometry("transmitter must sit strictly above the receiver");
  }
  if (!(d_tr_m > 0.0)) {
    throw InvalidGeometry("Tx-Rx separation must be positive");
  }
  if (!(tilt_tx_deg >= 0.0 && tilt_tx_deg < 90.0)) {
    throw InvalidGeometry("transmitter tilt must lie in [0, 90) degrees");
  }
}

void Blocker::validate() const {
  if (!(height_m > 0.0) || !(width_m > 0.0) || !(distance_from_rx_m >= 0.0)) {
    throw InvalidArgument("blocker needs positive height/width and non-negative distance");
  }
  const double base = opaque_base();
  if (!(base >= 0.0 && base <= height_m)) {
    throw InvalidArgument("blocker opaque base must lie within [0, height]");
  }
}

const char* to_string(PathKind kind) {
  switch (kind) {
    case PathKind::LoS:
      return "los";
    case PathKind::GroundReflection:
      return "ground_reflection";
    case PathKind::NLoS:
      return "nlos";
  }
  return "unknown";
}

double blocker_reach(const SiteGeometry& geom, double blocker_height_m) {
  geom.validate();
  if (blocker_height_m <= geom.h_rx_m) {
    return 0.0;
  }
  if (blocker_height_m >= geom.h_tx_m) {
    return geom.d_tr_m;
  }
  return geom.d_tr_m * (blocker_height_m - geom.h_rx_m) / (geom.h_tx_m - geom.h_rx_m);
}

RayPath los_path(const SiteGeometry& geom) {
  geom.validate();
  const double rise = geom.h_tx_m - geom.h_rx_m;
  const double elevation = rad_to_deg(std::atan2(rise, geom.d_tr_m));
  RayPath path;
  path.kind = PathKind::LoS;
  path.length_m = std::hypot(geom.d_tr_m, rise);
  path.departure_elevation_deg = -elevation;
  path.arrival_elevation_deg = elevation;
  return path;
}

RayPath ground_reflection_path(const SiteGeometry& geom) {
  geom.validate();
  const double image_rise = geom.h_tx_m + geom.h_rx_m;
  const double grazing = rad_to_deg(std::atan2(image_rise, geom.d_tr_m));
  RayPath path;
  path.kind = PathKind::GroundReflection;
  path.length_m = std::hypot(geom.d_tr_m, image_rise);
  path.departure_elevation_deg = -grazing;
  path.arrival_elevation_deg = -grazing;
  path.reflection_point_m = geom.d_tr_m * geom.h_tx_m / image_rise;
  return path;
}

RayPath nlos_path(const SiteGeometry& geom, double arrival_azimuth_deg, double excess_loss_db) {
  if (!(std::abs(arrival_azimuth_deg) < 90.0)) {
    throw InvalidArgument("NLoS arrival azimuth must lie in (-90, 90) degrees");
  }
  if (!(excess_loss_db >= 0.0)) {
    throw InvalidArgument("NLoS excess loss must be non-negative");
  }
  RayPath path = los_path(geom);
  path.kind = PathKind::NLoS;
  path.arrival_azimuth_deg = arrival_azimuth_deg;
  path.excess_loss_db = excess_loss_db;
  return path;
}

double ray_height_at(const SiteGeometry& geom, const RayPath& path, double distance_from_rx_m) {
  const double x = distance_from_rx_m;
  switch (path.kind) {
    case PathKind::LoS:
      return geom.h_rx_m + (geom.h_tx_m - geom.h_rx_m) * x / geom.d_tr_m;
    case PathKind::GroundReflection:
      // The unfolded image ray dips below ground past the bounce; folding it
      // back up gives the physical height on the transmitter-side leg.
      return std::abs(geom.h_rx_m - (geom.h_tx_m + geom.h_rx_m) * x / geom.d_tr_m);
    case PathKind::NLoS: {
      const double az = deg_to_rad(path.arrival_azimuth_deg);
      const double range = x / std::cos(az);
      return geom.h_rx_m + range * std::tan(deg_to_rad(path.arrival_elevation_deg));
    }
  }
  return 0.0;
}

bool is_blocked(const SiteGeometry& geom, const RayPath& path, const Blocker& blocker) {
  geom.validate();
  blocker.validate();
  const double x = blocker.distance_from_rx_m;
  if (path.kind != PathKind::NLoS && x > geom.d_tr_m) {
    return false;
  }
  double lateral = 0.0;
  if (path.kind == PathKind::NLoS) {
    lateral = x * std::tan(deg_to_rad(path.arrival_azimuth_deg));
  }
  if (std::abs(blocker.azimuth_offset_m - lateral) > blocker.width_m / 2.0) {
    return false;
  }
  const double h = ray_height_at(geom, path, x);
  return h >= blocker.opaque_base() && h <= blocker.height_m;
}

}  // namespace groundwave
