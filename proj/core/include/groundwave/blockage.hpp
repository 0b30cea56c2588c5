#pragma once

#include <string>
#include <vector>

#include "groundwave/channel.hpp"
#include "groundwave/geometry.hpp"

namespace groundwave {

struct BlockageEvent {
  double start_ms = 0.0;
  double duration_ms = 0.0;
  Blocker blocker;

  double end_ms() const { return start_ms + duration_ms; }
  bool active_at(double t_ms) const { return start_ms <= t_ms && t_ms < end_ms(); }
  void validate() const;

  bool operator==(const BlockageEvent&) const = default;
};

struct BlockageConfig {
  double rate_per_s = 0.2;
  double min_duration_ms = 100.0;
  double max_duration_ms = 300.0;
  double blocker_height_m = kDefaultBlockerHeight;
  double blocker_width_m = kDefaultBlockerWidth;

  void validate(double horizon_ms) const;

  bool operator==(const BlockageConfig&) const = default;
};

/// Poisson arrivals over [0, horizon). Each pedestrian stands on the LoS
/// plane at a distance drawn uniformly from (0, blocker_reach], so every
/// event cuts the direct ray. Events are sorted by start time.
std::vector<BlockageEvent> generate_events(double horizon_ms, const BlockageConfig& cfg,
                                           const SiteGeometry& geom, Rng& rng);

std::vector<Blocker> active_blockers(const std::vector<BlockageEvent>& events, double t_ms);

/// CSV with header start_ms,duration_ms,height_m,distance_from_rx_m,
/// azimuth_offset_m,width_m,opaque_base_m. Numbers are written with 17
/// significant digits so a round trip is exact.
std::string events_to_csv(const std::vector<BlockageEvent>& events);
std::vector<BlockageEvent> events_from_csv(const std::string& text);

}  // namespace groundwave
