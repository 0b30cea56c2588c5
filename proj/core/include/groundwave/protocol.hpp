#pragma once

// Blockage-recovery state machine for the receiver side.
//
// `step` is a pure function: the caller owns the state, delivers events
// (including probe results, as RssSample events carrying the probed beam)
// and executes the returned actions.

#include <optional>
#include <string>
#include <vector>

#include "groundwave/antenna.hpp"
#include "groundwave/channel.hpp"
#include "groundwave/geometry.hpp"

namespace groundwave {

enum class Mode { IA, NOp, BA, GRD, RBO };
enum class EventKind { RssSample, BlockageDetected, Timer, AlignmentNeeded, LosRestored };
enum class ActionKind { SwitchRxBeam, ProbeBeam, ProbeLoS, StoreGrBeam, RequestInitialAccess, None };

inline constexpr Mode kAllModes[] = {Mode::IA, Mode::NOp, Mode::BA, Mode::GRD, Mode::RBO};
inline constexpr EventKind kAllEventKinds[] = {EventKind::RssSample, EventKind::BlockageDetected,
                                               EventKind::Timer, EventKind::AlignmentNeeded,
                                               EventKind::LosRestored};

const char* to_string(Mode m);
const char* to_string(EventKind k);
const char* to_string(ActionKind k);

/// Most GRD probes an episode may spend: two neighbors plus a confirmation.
inline constexpr std::size_t kGrdProbeBudget = 3;

struct ProtocolEvent {
  EventKind kind = EventKind::Timer;
  LinkSample sample;        // RssSample only
  double elapsed_ms = 0.0;  // Timer only

  static ProtocolEvent rss(const LinkSample& s) { return {EventKind::RssSample, s, 0.0}; }
  static ProtocolEvent blockage() { return {EventKind::BlockageDetected, {}, 0.0}; }
  static ProtocolEvent timer(double elapsed) { return {EventKind::Timer, {}, elapsed}; }
  static ProtocolEvent alignment() { return {EventKind::AlignmentNeeded, {}, 0.0}; }
  static ProtocolEvent los_restored() { return {EventKind::LosRestored, {}, 0.0}; }
};

struct Action {
  ActionKind kind = ActionKind::None;
  std::optional<BeamId> beam;  // ProbeLoS carries B_RL so the radio knows what to probe

  static Action none() { return {}; }
  static Action switch_rx(BeamId b) { return {ActionKind::SwitchRxBeam, b}; }
  static Action probe(BeamId b) { return {ActionKind::ProbeBeam, b}; }
  static Action probe_los(BeamId b) { return {ActionKind::ProbeLoS, b}; }
  static Action store_gr(BeamId b) { return {ActionKind::StoreGrBeam, b}; }
  static Action request_access() { return {ActionKind::RequestInitialAccess, std::nullopt}; }

  bool operator==(const Action&) const = default;
};

struct ProtocolConfig {
  double noise_floor_dbm = -78.0;
  double detection_margin_db = 3.0;
  double hysteresis_db = 3.0;
  double rbo_period_ms = 100.0;
  double tx_el_beamwidth_deg = 60.0;

  double blockage_threshold_dbm() const { return noise_floor_dbm + detection_margin_db; }

  bool operator==(const ProtocolConfig&) const = default;
};

struct ProtocolState {
  Mode mode = Mode::IA;
  BeamId serving_rx_beam;  // B_RL, kept while RBO borrows the radio for B_GR
  BeamId serving_tx_beam;  // B_TL
  std::optional<BeamId> gr_beam;
  std::vector<LinkSample> grd_progress;
  double rbo_timer_ms = 0.0;

  std::optional<double> gr_rss_dbm;  // reading that confirmed gr_beam
  std::vector<BeamId> grd_plan;      // neighbors to probe, downward first
  bool grd_pending = false;          // start GRD on the next event in NOp
  bool grd_impossible = false;       // last GRD attempt found no elevation neighbor
  bool los_probe_pending = false;
  std::vector<BeamId> ba_plan;
  std::vector<LinkSample> ba_progress;
  std::optional<double> last_serving_rss_dbm;

  /// Beam the receiver should currently be listening on.
  BeamId active_rx_beam() const {
    return mode == Mode::RBO && gr_beam ? *gr_beam : serving_rx_beam;
  }

  bool operator==(const ProtocolState&) const = default;
};

struct StepResult {
  ProtocolState state;
  std::vector<Action> actions;
};

/// Elevation search window around B_RL: tilt plus half the Tx zenith width.
double grd_window(double tilt_tx_deg, double el_beamwidth_tx_deg);

/// Total transition function. Pairs without a defined transition return the
/// input state unchanged with a single None action. Throws ProtocolFault when
/// the state or event references a beam outside `rx_codebook`.
StepResult step(const ProtocolState& state, const ProtocolEvent& event,
                const Codebook& rx_codebook, const SiteGeometry& geom,
                const ProtocolConfig& cfg = {});

/// Throws ProtocolFault describing the first violated state invariant.
void check_invariants(const ProtocolState& state);

/// True when the latest sample sits at or below floor + margin.
bool detect_blockage(const std::vector<LinkSample>& recent, double margin_db,
                     double noise_floor_dbm = -78.0);

struct Transition {
  double time_ms = 0.0;
  Mode before = Mode::IA;
  EventKind event = EventKind::Timer;
  Mode after = Mode::IA;
  std::vector<Action> actions;

  bool operator==(const Transition&) const = default;
};

/// One transition per line: time_ms,mode_before,event,mode_after,actions
/// where actions is a ';'-joined list like "ProbeBeam(37)".
std::string transitions_to_csv(const std::vector<Transition>& transitions);

}  // namespace groundwave
