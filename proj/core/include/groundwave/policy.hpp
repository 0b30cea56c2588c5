#pragma once

// Recovery policies driven by the simulator through a common event/action
// surface. The ground-reflection policy wraps the protocol FSM; the others
// are the comparators from baselines.hpp.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "groundwave/antenna.hpp"
#include "groundwave/baselines.hpp"
#include "groundwave/protocol.hpp"

namespace groundwave {

struct PolicyCounters {
  std::size_t discovery_episodes = 0;
  std::size_t discovery_measurements = 0;
  std::size_t alignment_measurements = 0;
  std::size_t los_probes = 0;

  bool operator==(const PolicyCounters&) const = default;
};

struct PolicyContext {
  const Codebook* rx_codebook = nullptr;
  SiteGeometry geom;
  ProtocolConfig protocol;
  /// Geometric-model oracle used by ScanPlusModel: does this Rx beam mainly
  /// hear the direct path?
  std::function<bool(BeamId rx)> sees_los;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyKind kind() const = 0;
  virtual std::string mode_name() const = 0;
  virtual bool attached() const = 0;
  /// Beam the receiver should listen on right now.
  virtual BeamId rx_beam() const = 0;
  /// True while the serving LoS beam is in use and may be realigned.
  virtual bool tracking() const = 0;
  virtual std::vector<Action> handle(const ProtocolEvent& ev) = 0;

  virtual bool grd_impossible() const { return false; }
  /// The underlying FSM state, for policies that have one.
  virtual const ProtocolState* fsm_state() const { return nullptr; }

  const PolicyCounters& counters() const { return counters_; }

 protected:
  PolicyCounters counters_;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, const PolicyContext& ctx);

}  // namespace groundwave
