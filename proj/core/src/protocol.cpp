#include "groundwave/protocol.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "groundwave/errors.hpp"

namespace groundwave {
namespace {

StepResult unchanged(const ProtocolState& s) { return {s, {Action::none()}}; }

void require_beam(const Codebook& cb, BeamId id, const char* what) {
  if (!cb.contains(id)) {
    throw ProtocolFault(std::string(what) + " refers to beam " + std::to_string(id.value) +
                        " outside a " + std::to_string(cb.size()) + "-beam codebook");
  }
}

void validate_refs(const ProtocolState& s, const ProtocolEvent& ev, const Codebook& cb) {
  require_beam(cb, s.serving_rx_beam, "serving_rx_beam");
  if (s.gr_beam) {
    require_beam(cb, *s.gr_beam, "gr_beam");
  }
  for (BeamId b : s.grd_plan) {
    require_beam(cb, b, "grd plan");
  }
  for (BeamId b : s.ba_plan) {
    require_beam(cb, b, "ba plan");
  }
  if (ev.kind == EventKind::RssSample) {
    require_beam(cb, ev.sample.rx_beam, "sample");
  }
}

// Nearest downward and nearest upward neighbor inside the window.
std::vector<BeamId> grd_candidates(const Codebook& cb, BeamId serving, double window) {
  const double el = cb.at(serving).elevation_deg;
  std::optional<BeamId> down;
  std::optional<BeamId> up;
  for (BeamId n : elevation_neighbors(cb, serving, window)) {
    const double nel = cb.at(n).elevation_deg;
    if (nel < el && !down) {
      down = n;
    } else if (nel > el && !up) {
      up = n;
    }
  }
  std::vector<BeamId> plan;
  if (down) {
    plan.push_back(*down);
  }
  if (up) {
    plan.push_back(*up);
  }
  return plan;
}

void clear_grd(ProtocolState& s) {
  s.grd_progress.clear();
  s.grd_plan.clear();
}

void clear_ba(ProtocolState& s) {
  s.ba_plan.clear();
  s.ba_progress.clear();
}

StepResult on_blockage(ProtocolState s, const ProtocolConfig& cfg) {
  if (s.gr_beam) {
    s.mode = Mode::RBO;
    s.rbo_timer_ms = cfg.rbo_period_ms;
    s.los_probe_pending = false;
    return {s, {Action::switch_rx(*s.gr_beam)}};
  }
  s.mode = Mode::IA;
  s.grd_pending = false;
  s.last_serving_rss_dbm.reset();
  return {s, {Action::request_access()}};
}

StepResult step_ia(const ProtocolState& in, const ProtocolEvent& ev, const ProtocolConfig& cfg) {
  if (ev.kind != EventKind::RssSample || ev.sample.rss_dbm <= cfg.blockage_threshold_dbm()) {
    return unchanged(in);
  }
  ProtocolState s = in;
  s.mode = Mode::NOp;
  s.serving_rx_beam = ev.sample.rx_beam;
  s.serving_tx_beam = ev.sample.tx_beam;
  s.gr_beam.reset();
  s.gr_rss_dbm.reset();
  s.grd_pending = true;
  s.grd_impossible = false;
  s.last_serving_rss_dbm = ev.sample.rss_dbm;
  return {s, {Action::switch_rx(s.serving_rx_beam)}};
}

StepResult step_nop(const ProtocolState& in, const ProtocolEvent& ev, const Codebook& cb,
                    const SiteGeometry& geom, const ProtocolConfig& cfg) {
  ProtocolState s = in;
  switch (ev.kind) {
    case EventKind::RssSample: {
      if (ev.sample.rx_beam == s.serving_rx_beam) {
        s.last_serving_rss_dbm = ev.sample.rss_dbm;
      }
      if (!s.grd_pending) {
        return {s, {Action::none()}};
      }
      s.grd_pending = false;
      s.grd_plan = grd_candidates(cb, s.serving_rx_beam,
                                  grd_window(geom.tilt_tx_deg, cfg.tx_el_beamwidth_deg));
      if (s.grd_plan.empty()) {
        s.grd_impossible = true;
        return {s, {Action::none()}};
      }
      s.grd_impossible = false;
      s.mode = Mode::GRD;
      return {s, {Action::probe(s.grd_plan.front())}};
    }
    case EventKind::BlockageDetected:
      return on_blockage(s, cfg);
    case EventKind::AlignmentNeeded: {
      s.ba_plan = azimuth_neighbors(cb, s.serving_rx_beam);
      s.ba_progress.clear();
      if (s.ba_plan.empty()) {
        return unchanged(in);
      }
      s.mode = Mode::BA;
      return {s, {Action::probe(s.ba_plan.front())}};
    }
    case EventKind::Timer:
    case EventKind::LosRestored:
      break;
  }
  return unchanged(in);
}

StepResult step_grd(const ProtocolState& in, const ProtocolEvent& ev, const ProtocolConfig& cfg) {
  if (ev.kind == EventKind::BlockageDetected) {
    ProtocolState s = in;
    clear_grd(s);
    s.grd_pending = true;
    return on_blockage(s, cfg);
  }
  if (ev.kind != EventKind::RssSample) {
    return unchanged(in);
  }
  ProtocolState s = in;
  const std::size_t n_plan = s.grd_plan.size();
  const std::size_t done = s.grd_progress.size();
  if (done < n_plan) {
    if (ev.sample.rx_beam != s.grd_plan[done]) {
      return unchanged(in);
    }
    s.grd_progress.push_back(ev.sample);
    if (done + 1 < n_plan) {
      return {s, {Action::probe(s.grd_plan[done + 1])}};
    }
    // Highest reading wins; on a tie the downward beam (probed first) stays.
    const auto best = std::max_element(
        s.grd_progress.begin(), s.grd_progress.end(),
        [](const LinkSample& a, const LinkSample& b) { return a.rss_dbm < b.rss_dbm; });
    return {s, {Action::probe(best->rx_beam)}};
  }
  const auto best = std::max_element(
      s.grd_progress.begin(), s.grd_progress.end(),
      [](const LinkSample& a, const LinkSample& b) { return a.rss_dbm < b.rss_dbm; });
  if (ev.sample.rx_beam != best->rx_beam) {
    return unchanged(in);
  }
  const BeamId winner = best->rx_beam;
  clear_grd(s);
  s.mode = Mode::NOp;
  if (ev.sample.rss_dbm > cfg.blockage_threshold_dbm()) {
    s.gr_beam = winner;
    s.gr_rss_dbm = ev.sample.rss_dbm;
    return {s, {Action::store_gr(winner)}};
  }
  return {s, {Action::none()}};
}

StepResult step_ba(const ProtocolState& in, const ProtocolEvent& ev, const Codebook& cb,
                   const ProtocolConfig& cfg) {
  if (ev.kind == EventKind::BlockageDetected) {
    ProtocolState s = in;
    clear_ba(s);
    return on_blockage(s, cfg);
  }
  if (ev.kind != EventKind::RssSample) {
    return unchanged(in);
  }
  const std::size_t done = in.ba_progress.size();
  if (done >= in.ba_plan.size() || ev.sample.rx_beam != in.ba_plan[done]) {
    return unchanged(in);
  }
  ProtocolState s = in;
  s.ba_progress.push_back(ev.sample);
  if (done + 1 < s.ba_plan.size()) {
    return {s, {Action::probe(s.ba_plan[done + 1])}};
  }
  const auto best = std::max_element(
      s.ba_progress.begin(), s.ba_progress.end(),
      [](const LinkSample& a, const LinkSample& b) { return a.rss_dbm < b.rss_dbm; });
  const double current = s.last_serving_rss_dbm.value_or(cfg.noise_floor_dbm);
  std::vector<Action> actions;
  if (best->rss_dbm > current) {
    const BeamId next = best->rx_beam;
    if (s.gr_beam) {
      // Keep B_GR in the same azimuth column as the new B_RL.
      s.gr_beam = cb.id_at(cb.row_of(*s.gr_beam), cb.column_of(next));
    }
    s.serving_rx_beam = next;
    s.last_serving_rss_dbm = best->rss_dbm;
    actions.push_back(Action::switch_rx(next));
  } else {
    actions.push_back(Action::none());
  }
  clear_ba(s);
  s.mode = Mode::NOp;
  s.grd_pending = true;
  return {s, actions};
}

StepResult step_rbo(const ProtocolState& in, const ProtocolEvent& ev, const ProtocolConfig& cfg) {
  ProtocolState s = in;
  switch (ev.kind) {
    case EventKind::Timer: {
      if (s.los_probe_pending) {
        return unchanged(in);
      }
      s.rbo_timer_ms = std::max(0.0, s.rbo_timer_ms - ev.elapsed_ms);
      if (s.rbo_timer_ms > 0.0) {
        return {s, {Action::none()}};
      }
      s.los_probe_pending = true;
      return {s, {Action::probe_los(s.serving_rx_beam)}};
    }
    case EventKind::RssSample: {
      if (!s.los_probe_pending || ev.sample.rx_beam != s.serving_rx_beam) {
        return unchanged(in);
      }
      s.los_probe_pending = false;
      const double gr_ref = s.gr_rss_dbm.value_or(cfg.blockage_threshold_dbm());
      if (ev.sample.rss_dbm >= gr_ref + cfg.hysteresis_db) {
        s.mode = Mode::NOp;
        s.rbo_timer_ms = 0.0;
        s.last_serving_rss_dbm = ev.sample.rss_dbm;
        return {s, {Action::switch_rx(s.serving_rx_beam)}};
      }
      s.rbo_timer_ms = cfg.rbo_period_ms;
      return {s, {Action::none()}};
    }
    case EventKind::LosRestored:
      s.mode = Mode::NOp;
      s.rbo_timer_ms = 0.0;
      s.los_probe_pending = false;
      return {s, {Action::switch_rx(s.serving_rx_beam)}};
    case EventKind::BlockageDetected:
    case EventKind::AlignmentNeeded:
      break;
  }
  return unchanged(in);
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::IA:
      return "IA";
    case Mode::NOp:
      return "NOp";
    case Mode::BA:
      return "BA";
    case Mode::GRD:
      return "GRD";
    case Mode::RBO:
      return "RBO";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::RssSample:
      return "RssSample";
    case EventKind::BlockageDetected:
      return "BlockageDetected";
    case EventKind::Timer:
      return "Timer";
    case EventKind::AlignmentNeeded:
      return "AlignmentNeeded";
    case EventKind::LosRestored:
      return "LosRestored";
  }
  return "?";
}

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::SwitchRxBeam:
      return "SwitchRxBeam";
    case ActionKind::ProbeBeam:
      return "ProbeBeam";
    case ActionKind::ProbeLoS:
      return "ProbeLoS";
    case ActionKind::StoreGrBeam:
      return "StoreGrBeam";
    case ActionKind::RequestInitialAccess:
      return "RequestInitialAccess";
    case ActionKind::None:
      return "None";
  }
  return "?";
}

double grd_window(double tilt_tx_deg, double el_beamwidth_tx_deg) {
  if (tilt_tx_deg < 0.0 || el_beamwidth_tx_deg < 0.0) {
    throw InvalidArgument("grd_window inputs must be non-negative");
  }
  return tilt_tx_deg + el_beamwidth_tx_deg / 2.0;
}

StepResult step(const ProtocolState& state, const ProtocolEvent& event,
                const Codebook& rx_codebook, const SiteGeometry& geom,
                const ProtocolConfig& cfg) {
  validate_refs(state, event, rx_codebook);
  switch (state.mode) {
    case Mode::IA:
      return step_ia(state, event, cfg);
    case Mode::NOp:
      return step_nop(state, event, rx_codebook, geom, cfg);
    case Mode::GRD:
      return step_grd(state, event, cfg);
    case Mode::BA:
      return step_ba(state, event, rx_codebook, cfg);
    case Mode::RBO:
      return step_rbo(state, event, cfg);
  }
  throw ProtocolFault("protocol state has an unknown mode");
}

void check_invariants(const ProtocolState& s) {
  if (s.mode == Mode::RBO && !s.gr_beam) {
    throw ProtocolFault("RBO without a stored ground-reflection beam");
  }
  if (!s.grd_progress.empty() && s.mode != Mode::GRD) {
    throw ProtocolFault("GRD measurements held outside GRD");
  }
  if (s.grd_progress.size() > kGrdProbeBudget) {
    throw ProtocolFault("GRD measurement budget exceeded");
  }
  if (s.gr_beam.has_value() != s.gr_rss_dbm.has_value()) {
    throw ProtocolFault("gr_beam and its reference reading out of sync");
  }
  if (s.rbo_timer_ms < 0.0) {
    throw ProtocolFault("negative RBO timer");
  }
}

bool detect_blockage(const std::vector<LinkSample>& recent, double margin_db,
                     double noise_floor_dbm) {
  if (recent.empty()) {
    throw InvalidArgument("detect_blockage needs at least one sample");
  }
  return recent.back().rss_dbm <= noise_floor_dbm + margin_db;
}

std::string transitions_to_csv(const std::vector<Transition>& transitions) {
  std::ostringstream os;
  os << "time_ms,mode_before,event,mode_after,actions\n";
  os << std::fixed << std::setprecision(1);
  for (const auto& t : transitions) {
    os << t.time_ms << ',' << to_string(t.before) << ',' << to_string(t.event) << ','
       << to_string(t.after) << ',';
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      if (i) {
        os << ';';
      }
      os << to_string(t.actions[i].kind);
      if (t.actions[i].beam) {
        os << '(' << t.actions[i].beam->value << ')';
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace groundwave
