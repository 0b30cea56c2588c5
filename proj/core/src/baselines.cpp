#include "groundwave/baselines.hpp"

#include <algorithm>
#include <string>

#include "groundwave/errors.hpp"

namespace groundwave {

void AccessModel::validate() const {
  if (n_sweep_beams == 0 || !(sweep_period_ms > 0.0) || !(attach_overhead_ms >= 0.0)) {
    throw InvalidArgument("access model needs a positive sweep and non-negative attach overhead");
  }
}

double worst_case_discovery_latency(const AccessModel& m) {
  m.validate();
  return static_cast<double>(m.n_sweep_beams) * m.sweep_period_ms;
}

double handover_outage(const AccessModel& m, const BlockageEvent& blockage, double detection_ms) {
  blockage.validate();
  if (!(detection_ms >= 0.0)) {
    throw InvalidArgument("detection time must be non-negative");
  }
  return std::min(blockage.duration_ms, detection_ms) + worst_case_discovery_latency(m) +
         m.attach_overhead_ms;
}

ScanResult exhaustive_scan(const std::vector<BeamId>& candidates, const MeasureFn& measure) {
  if (candidates.empty()) {
    throw InvalidArgument("exhaustive scan over an empty beam set");
  }
  ScanResult r;
  r.beam = candidates.front();
  r.rss_dbm = measure(candidates.front());
  r.measurements = 1;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = measure(candidates[i]);
    ++r.measurements;
    if (v > r.rss_dbm || (v == r.rss_dbm && candidates[i] < r.beam)) {
      r.rss_dbm = v;
      r.beam = candidates[i];
    }
  }
  return r;
}

ScanResult exhaustive_scan(const Codebook& cb, const MeasureFn& measure) {
  std::vector<BeamId> all;
  all.reserve(cb.size());
  for (std::size_t i = 0; i < cb.size(); ++i) {
    all.push_back(BeamId{i});
  }
  return exhaustive_scan(all, measure);
}

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::GroundReflection:
      return "gr";
    case PolicyKind::ExhaustiveScan:
      return "exhaustive";
    case PolicyKind::ScanPlusModel:
      return "scan-model";
    case PolicyKind::Handover:
      return "handover";
  }
  return "?";
}

PolicyKind policy_from_string(std::string_view name) {
  for (PolicyKind k : kAllPolicies) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw InvalidArgument("unknown policy '" + std::string(name) +
                        "' (expected gr, exhaustive, scan-model or handover)");
}

}  // namespace groundwave
