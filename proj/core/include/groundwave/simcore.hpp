#pragma once

// Fixed-step discrete-event simulation of one link under pedestrian blockage.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "groundwave/baselines.hpp"
#include "groundwave/blockage.hpp"
#include "groundwave/calibration.hpp"
#include "groundwave/channel.hpp"
#include "groundwave/policy.hpp"
#include "groundwave/protocol.hpp"

namespace groundwave {

/// Everything a run needs, in plain values. The receive codebook rows are
/// relative to a boresight facing the transmitter (see facing_rx_codebook).
struct ScenarioConfig {
  SiteGeometry geom{2.5, 1.0, 6.0, 20.0};
  Surface surface = Surface::OutdoorConcrete;
  LinkBudget budget;  // system_loss_db is overwritten from the calibration
  CodebookSpec tx_codebook;
  CodebookSpec rx_codebook{25, 120.0, 18.0, 36.0, 17.0, {-30.0, 0.0, 30.0}, 0.0};
  NlosConfig nlos;
  BlockageConfig blockage;
  AccessModel access;
  ProtocolConfig protocol;  // noise floor and Tx zenith width are synced on build
  PolicyKind policy = PolicyKind::GroundReflection;
  double horizon_ms = 60'000.0;
  double probe_interval_ms = 10.0;
  double noise_sigma_db = 0.5;
  std::size_t ba_window = 20;
  double ba_drop_db = 3.0;
  std::uint64_t seed = 42;
  bool record_trace = false;
  bool record_transitions = false;
  /// Replay these events instead of drawing new ones.
  std::optional<std::vector<BlockageEvent>> events;

  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// A validated, ready-to-run scenario.
struct Scenario {
  ScenarioConfig config;
  Channel channel;
  std::vector<BlockageEvent> events;
};

/// Builds codebooks and the calibrated channel and draws (or adopts) the
/// blockage events. Throws ScenarioFault on inconsistent inputs, including a
/// surface the calibration does not cover.
Scenario build_scenario(const ScenarioConfig& cfg, const Calibration& cal);

struct TracePoint {
  double time_ms = 0.0;
  double rss_dbm = 0.0;
  std::string mode;

  bool operator==(const TracePoint&) const = default;
};

struct EventOutcome {
  double start_ms = 0.0;
  double duration_ms = 0.0;
  double distance_from_rx_m = 0.0;
  bool survived = true;
  double outage_ms = 0.0;

  bool operator==(const EventOutcome&) const = default;
};

struct RunMetrics {
  PolicyKind policy = PolicyKind::GroundReflection;
  std::uint64_t seed = 0;
  double horizon_ms = 0.0;
  double total_outage_ms = 0.0;
  std::size_t n_blockage_events = 0;
  std::size_t n_events_survived = 0;
  std::size_t n_interruptions = 0;  // detections that took the link down
  std::size_t discovery_episodes = 0;
  std::size_t discovery_measurements = 0;
  std::size_t reacquisitions = 0;
  std::size_t reacquisition_measurements = 0;
  std::size_t alignment_measurements = 0;
  std::size_t los_probes = 0;
  double mean_rss_during_blockage_dbm = 0.0;
  std::vector<double> recovery_latency_ms;
  std::vector<EventOutcome> events;
  std::vector<TracePoint> rss_trace;
  std::vector<Transition> transitions;
  bool grd_impossible = false;

  std::size_t measurements_total() const {
    return discovery_measurements + reacquisition_measurements;
  }
  /// Measurements per backup-path discovery episode; policies that never
  /// discover one report their cost per re-acquisition sweep instead.
  double measurements_per_episode() const;

  bool operator==(const RunMetrics&) const = default;
};

RunMetrics run(const Scenario& scenario);

/// Convenience: build_scenario + run.
RunMetrics run(const ScenarioConfig& cfg, const Calibration& cal);

/// One axis of a sweep grid. Supported parameters: tilt_deg, d_tr_m, h_tx_m,
/// h_rx_m, rate_per_s, noise_sigma_db, probe_interval_ms, horizon_ms.
struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
};

struct SweepPoint {
  std::size_t index = 0;
  ScenarioConfig config;
  RunMetrics metrics;
};

/// Seed of grid point `index`; index 0 keeps the base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Cartesian product of the axes (first axis varies slowest). Runs may
/// execute concurrently; results come back in grid order and do not depend
/// on `parallel`.
std::vector<SweepPoint> sweep(const ScenarioConfig& base, const Calibration& cal,
                              const std::vector<SweepAxis>& grid, bool parallel = true);

}  // namespace groundwave
