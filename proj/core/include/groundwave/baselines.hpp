#pragma once

// Comparator recovery strategies and the shared access-latency model.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "groundwave/antenna.hpp"
#include "groundwave/blockage.hpp"

namespace groundwave {

/// Beam-sweep initial access: the mobile hears one synchronization beam per
/// sweep period and needs a full sweep in the worst case.
struct AccessModel {
  std::size_t n_sweep_beams = 64;
  double sweep_period_ms = 20.0;
  double attach_overhead_ms = 500.0;

  void validate() const;

  bool operator==(const AccessModel&) const = default;
};

double worst_case_discovery_latency(const AccessModel& m);

/// Outage of a handover-style recovery: detection, full discovery sweep and
/// attach, regardless of when the blocker leaves.
double handover_outage(const AccessModel& m, const BlockageEvent& blockage,
                       double detection_ms = 10.0);

struct ScanResult {
  BeamId beam;
  std::size_t measurements = 0;
  double rss_dbm = 0.0;
};

using MeasureFn = std::function<double(BeamId)>;

/// Measures every beam once; the highest reading wins, lowest index on ties.
ScanResult exhaustive_scan(const Codebook& cb, const MeasureFn& measure);
/// Same over an explicit candidate list (e.g. one elevation row).
ScanResult exhaustive_scan(const std::vector<BeamId>& candidates, const MeasureFn& measure);

enum class PolicyKind { GroundReflection, ExhaustiveScan, ScanPlusModel, Handover };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::GroundReflection,
                                              PolicyKind::ExhaustiveScan,
                                              PolicyKind::ScanPlusModel, PolicyKind::Handover};

/// CLI names: gr, exhaustive, scan-model, handover.
const char* to_string(PolicyKind k);
PolicyKind policy_from_string(std::string_view name);

struct PolicyReport {
  PolicyKind policy = PolicyKind::GroundReflection;
  double measurements_used = 0.0;  // per discovery or re-acquisition episode
  double outage_ms = 0.0;
  double recovered_rss_dbm = 0.0;  // mean delivered RSS while LoS is blocked
  std::string note;
};

}  // namespace groundwave
