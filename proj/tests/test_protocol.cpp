#include <doctest.h>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>

#include "groundwave/calibration.hpp"
#include "groundwave/errors.hpp"
#include "groundwave/protocol.hpp"

using namespace groundwave;

namespace {

const SiteGeometry kSite{2.5, 1.0, 6.0, 20.0};

Codebook rx_codebook() {
  CodebookSpec s;
  s.el_beamwidth_deg = 36.0;
  s.elevation_rows_deg = {-30.0, 0.0, 30.0};
  return facing_rx_codebook(s, kSite);
}

LinkSample sample(BeamId rx, double rss, double t = 0.0) {
  LinkSample s;
  s.time_ms = t;
  s.tx_beam = BeamId{12};
  s.rx_beam = rx;
  s.rss_dbm = rss;
  return s;
}

// Drives the FSM and answers probes from an RSS field.
struct Harness {
  Codebook cb = rx_codebook();
  ProtocolConfig cfg;
  ProtocolState st;
  std::function<double(BeamId)> field = [](BeamId) { return -60.0; };
  std::vector<Action> log;
  std::vector<Transition> steps;  // every FSM step, including probe answers

  std::vector<Action> feed(const ProtocolEvent& ev) {
    std::vector<Action> emitted;
    std::deque<ProtocolEvent> q{ev};
    while (!q.empty()) {
      const Mode before = st.mode;
      const StepResult r = step(st, q.front(), cb, kSite, cfg);
      steps.push_back(Transition{0.0, before, q.front().kind, r.state.mode, r.actions});
      q.pop_front();
      st = r.state;
      check_invariants(st);
      for (const Action& a : r.actions) {
        emitted.push_back(a);
        if (a.kind == ActionKind::ProbeBeam || a.kind == ActionKind::ProbeLoS) {
          q.push_back(ProtocolEvent::rss(sample(*a.beam, field(*a.beam))));
        }
      }
    }
    log.insert(log.end(), emitted.begin(), emitted.end());
    return emitted;
  }

  BeamId b_rl() const { return cb.id_at(1, 12); }
  BeamId down() const { return cb.id_at(0, 12); }
  BeamId up() const { return cb.id_at(2, 12); }

  // Attach on B_RL and run the first GRD with the bounce on the lower row.
  void attach_and_discover() {
    field = [this](BeamId b) {
      if (b == down()) return -64.0;
      if (b == up()) return -69.0;
      return -60.0;
    };
    feed(ProtocolEvent::rss(sample(b_rl(), -60.0)));
    feed(ProtocolEvent::rss(sample(b_rl(), -60.0)));
  }
};

std::size_t count(const std::vector<Action>& v, ActionKind k) {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [k](const Action& a) { return a.kind == k; }));
}

}  // namespace

TEST_CASE("elevation search window") {
  CHECK(grd_window(0.0, 60.0) == 30.0);
  CHECK(grd_window(0.0, 0.0) == 0.0);
  CHECK(grd_window(10.0, 60.0) == 40.0);
  CHECK(grd_window(0.0, 30.0) == 15.0);
  CHECK_THROWS_AS(grd_window(-1.0, 60.0), InvalidArgument);
}

TEST_CASE("blockage detection threshold") {
  CHECK(detect_blockage({sample(BeamId{}, -78.0)}, 3.0));
  CHECK_FALSE(detect_blockage({sample(BeamId{}, -60.0)}, 3.0));
  CHECK(detect_blockage({sample(BeamId{}, -78.0)}, 0.0));
  CHECK(detect_blockage({sample(BeamId{}, -60.0), sample(BeamId{}, -76.0)}, 3.0));
  CHECK_FALSE(detect_blockage({sample(BeamId{}, -78.0), sample(BeamId{}, -74.9)}, 3.0));
  CHECK_THROWS_AS(detect_blockage({}, 3.0), InvalidArgument);
}

TEST_CASE("attach, then discover the bounce beam with three probes") {
  Harness h;
  h.attach_and_discover();
  CHECK(h.st.mode == Mode::NOp);
  REQUIRE(h.st.gr_beam.has_value());
  CHECK(*h.st.gr_beam == h.down());
  CHECK(*h.st.gr_rss_dbm == -64.0);
  std::vector<BeamId> probes;
  for (const Action& a : h.log) {
    if (a.kind == ActionKind::ProbeBeam) probes.push_back(*a.beam);
  }
  REQUIRE(probes.size() == 3);
  CHECK(probes[0] == h.down());
  CHECK(probes[1] == h.up());
  CHECK(probes[2] == h.down());
  CHECK(h.log.back() == Action::store_gr(h.down()));
}

TEST_CASE("upward neighbor wins when it reads higher") {
  Harness h;
  h.field = [&h](BeamId b) { return b == h.up() ? -63.0 : -70.0; };
  h.feed(ProtocolEvent::rss(sample(h.b_rl(), -60.0)));
  h.feed(ProtocolEvent::rss(sample(h.b_rl(), -60.0)));
  REQUIRE(h.st.gr_beam.has_value());
  CHECK(*h.st.gr_beam == h.up());
}

TEST_CASE("confirmation below the floor margin stores nothing") {
  Harness h;
  h.field = [](BeamId) { return -77.0; };
  h.feed(ProtocolEvent::rss(sample(h.b_rl(), -60.0)));
  const auto acts = h.feed(ProtocolEvent::rss(sample(h.b_rl(), -60.0)));
  CHECK(count(acts, ActionKind::ProbeBeam) == 3);
  CHECK(count(acts, ActionKind::StoreGrBeam) == 0);
  CHECK_FALSE(h.st.gr_beam.has_value());
  CHECK(h.st.mode == Mode::NOp);
  // Without a stored bounce beam a blockage falls back to initial access.
  const auto fallback = h.feed(ProtocolEvent::blockage());
  CHECK(fallback == std::vector<Action>{Action::request_access()});
  CHECK(h.st.mode == Mode::IA);
}

TEST_CASE("blockage switches to the bounce beam and LoS returns after the timer") {
  Harness h;
  h.attach_and_discover();
  const auto on_block = h.feed(ProtocolEvent::blockage());
  CHECK(on_block == std::vector<Action>{Action::switch_rx(h.down())});
  CHECK(h.st.mode == Mode::RBO);
  CHECK(h.st.rbo_timer_ms == 100.0);
  CHECK(h.st.active_rx_beam() == h.down());

  // Still blocked at the first LoS probe: stay and re-arm.
  h.field = [](BeamId) { return -78.0; };
  for (int i = 0; i < 9; ++i) {
    CHECK(h.feed(ProtocolEvent::timer(10.0)) == std::vector<Action>{Action::none()});
  }
  auto acts = h.feed(ProtocolEvent::timer(10.0));
  CHECK(count(acts, ActionKind::ProbeLoS) == 1);
  CHECK(acts.front() == Action::probe_los(h.b_rl()));
  CHECK(h.st.mode == Mode::RBO);
  CHECK(h.st.rbo_timer_ms == 100.0);

  // Blocker gone: the next probe returns to NOp on B_RL.
  h.field = [](BeamId) { return -60.0; };
  acts = h.feed(ProtocolEvent::timer(100.0));
  CHECK(acts == std::vector<Action>{Action::probe_los(h.b_rl()), Action::switch_rx(h.b_rl())});
  CHECK(h.st.mode == Mode::NOp);
  CHECK(h.st.active_rx_beam() == h.b_rl());
}

TEST_CASE("LoS must beat the bounce reading by the hysteresis") {
  Harness h;
  h.attach_and_discover();
  h.feed(ProtocolEvent::blockage());
  h.field = [](BeamId) { return -61.5; };  // only 2.5 dB above the stored -64
  h.feed(ProtocolEvent::timer(100.0));
  CHECK(h.st.mode == Mode::RBO);
  h.field = [](BeamId) { return -61.0; };
  h.feed(ProtocolEvent::timer(100.0));
  CHECK(h.st.mode == Mode::NOp);
}

TEST_CASE("explicit LoS restoration leaves RBO") {
  Harness h;
  h.attach_and_discover();
  h.feed(ProtocolEvent::blockage());
  CHECK(h.feed(ProtocolEvent::los_restored()) == std::vector<Action>{Action::switch_rx(h.b_rl())});
  CHECK(h.st.mode == Mode::NOp);
}

TEST_CASE("beam adaptation moves B_RL and B_GR together, then refreshes GRD") {
  Harness h;
  h.attach_and_discover();
  const BeamId right = h.cb.id_at(1, 13);
  h.field = [&](BeamId b) { return b == right ? -59.0 : -63.0; };
  h.st.last_serving_rss_dbm = -63.5;
  auto acts = h.feed(ProtocolEvent::alignment());
  CHECK(count(acts, ActionKind::ProbeBeam) == 2);
  CHECK(acts.back() == Action::switch_rx(right));
  CHECK(h.st.mode == Mode::NOp);
  CHECK(h.st.serving_rx_beam == right);
  CHECK(*h.st.gr_beam == h.cb.id_at(0, 13));
  CHECK(h.st.grd_pending);
  h.field = [&](BeamId b) { return h.cb.row_of(b) == 0 ? -64.0 : -70.0; };
  acts = h.feed(ProtocolEvent::rss(sample(right, -59.0)));
  CHECK(count(acts, ActionKind::ProbeBeam) == 3);
  for (const Action& a : acts) {
    if (a.beam) CHECK(h.cb.column_of(*a.beam) == 13);
  }
}

TEST_CASE("single elevation row makes GRD impossible") {
  Harness h;
  CodebookSpec flat;
  h.cb = facing_rx_codebook(flat, kSite);
  h.feed(ProtocolEvent::rss(sample(BeamId{12}, -60.0)));
  const auto acts = h.feed(ProtocolEvent::rss(sample(BeamId{12}, -60.0)));
  CHECK(acts == std::vector<Action>{Action::none()});
  CHECK(h.st.grd_impossible);
  CHECK(h.st.mode == Mode::NOp);
}

TEST_CASE("unknown beam references are protocol faults") {
  const Codebook cb = rx_codebook();
  ProtocolState st;
  CHECK_THROWS_AS(step(st, ProtocolEvent::rss(sample(BeamId{500}, -60.0)), cb, kSite), ProtocolFault);
  st.serving_rx_beam = BeamId{75};
  CHECK_THROWS_AS(step(st, ProtocolEvent::timer(10.0), cb, kSite), ProtocolFault);
  st.serving_rx_beam = BeamId{1};
  st.gr_beam = BeamId{99};
  CHECK_THROWS_AS(step(st, ProtocolEvent::timer(10.0), cb, kSite), ProtocolFault);
}

TEST_CASE("invariant checker") {
  ProtocolState st;
  st.mode = Mode::RBO;
  CHECK_THROWS_AS(check_invariants(st), ProtocolFault);
  st.mode = Mode::NOp;
  st.grd_progress.push_back(LinkSample{});
  CHECK_THROWS_AS(check_invariants(st), ProtocolFault);
}

TEST_CASE("every mode accepts every event kind") {
  // One reachable state per mode.
  std::map<Mode, ProtocolState> states;
  Harness h;
  states[Mode::IA] = h.st;
  h.attach_and_discover();
  states[Mode::NOp] = h.st;
  {
    Harness g;
    g.feed(ProtocolEvent::rss(sample(g.b_rl(), -60.0)));
    states[Mode::GRD] = step(g.st, ProtocolEvent::rss(sample(g.b_rl(), -60.0)), g.cb, kSite).state;
  }
  states[Mode::BA] = step(h.st, ProtocolEvent::alignment(), h.cb, kSite).state;
  states[Mode::RBO] = step(h.st, ProtocolEvent::blockage(), h.cb, kSite).state;
  REQUIRE(states.size() == 5);
  for (const auto& [mode, st] : states) {
    REQUIRE(st.mode == mode);
    for (EventKind kind : kAllEventKinds) {
      ProtocolEvent ev;
      ev.kind = kind;
      ev.elapsed_ms = 10.0;
      ev.sample = sample(h.b_rl(), -70.0);
      CAPTURE(to_string(mode));
      CAPTURE(to_string(kind));
      StepResult r;
      CHECK_NOTHROW(r = step(st, ev, h.cb, kSite));
      CHECK_FALSE(r.actions.empty());
      CHECK_NOTHROW(check_invariants(r.state));
    }
  }
  // Spot-check the pass-through contract.
  const ProtocolState& ia = states[Mode::IA];
  const StepResult r = step(ia, ProtocolEvent::timer(10.0), h.cb, kSite);
  CHECK(r.state == ia);
  CHECK(r.actions == std::vector<Action>{Action::none()});
  const ProtocolState& rbo = states[Mode::RBO];
  const StepResult r2 = step(rbo, ProtocolEvent::alignment(), h.cb, kSite);
  CHECK(r2.state == rbo);
  CHECK(r2.actions == std::vector<Action>{Action::none()});
}

TEST_CASE("randomized event sequences keep invariants and the GRD budget") {
  Harness h;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> level(-80.0, -55.0);
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<std::size_t> any_beam(0, h.cb.size() - 1);
  std::uniform_real_distribution<double> elapsed(0.0, 60.0);
  h.field = [&](BeamId) { return level(rng); };

  std::size_t grd_probes = 0;
  std::size_t episodes = 0;
  bool handover_after_store = false;
  std::uniform_int_distribution<std::size_t> any_column(0, h.cb.columns() - 1);
  std::size_t full_episodes = 0;
  for (int i = 0; i < 100'000; ++i) {
    // Periodic fresh attach on the middle row keeps two-neighbor episodes coming.
    if (i % 1000 == 0) {
      h.st = ProtocolState{};
      h.feed(ProtocolEvent::rss(sample(h.cb.id_at(1, any_column(rng)), -60.0)));
    }
    const int k = kind(rng);
    ProtocolEvent ev;
    if (k <= 3) {
      const BeamId b = k == 0 ? BeamId{any_beam(rng)} : h.st.active_rx_beam();
      ev = ProtocolEvent::rss(sample(b, level(rng)));
    } else if (k <= 5) {
      ev = ProtocolEvent::timer(elapsed(rng));
    } else if (k == 6) {
      ev = ProtocolEvent::blockage();
    } else if (k == 7) {
      ev = ProtocolEvent::alignment();
    } else if (k == 8) {
      ev = ProtocolEvent::los_restored();
    } else {
      ev = ProtocolEvent::rss(sample(h.st.serving_rx_beam, level(rng)));
    }
    const bool had_gr = h.st.gr_beam.has_value();
    const BeamId serving = h.st.serving_rx_beam;
    const std::size_t first = h.steps.size();
    REQUIRE_NOTHROW(h.feed(ev));
    for (std::size_t s = first; s < h.steps.size(); ++s) {
      const Transition& t = h.steps[s];
      if (t.before != Mode::GRD && t.after == Mode::GRD) {
        ++episodes;
        grd_probes = 0;
      }
      for (const Action& a : t.actions) {
        if (a.kind == ActionKind::ProbeBeam && t.after == Mode::GRD) {
          ++grd_probes;
          // Every GRD probe stays in B_RL's azimuth column.
          CHECK(h.cb.column_of(*a.beam) == h.cb.column_of(serving));
        }
        if (a.kind == ActionKind::RequestInitialAccess && had_gr) {
          handover_after_store = true;
        }
      }
      CHECK(grd_probes <= kGrdProbeBudget);
      if (t.before == Mode::GRD && t.after != Mode::GRD && grd_probes == kGrdProbeBudget) {
        ++full_episodes;
      }
    }
    CHECK(h.st.grd_progress.size() <= kGrdProbeBudget);
  }
  CHECK(episodes > 100);
  CHECK(full_episodes > 10);
  CHECK_FALSE(handover_after_store);
}

TEST_CASE("transition log format") {
  Transition t;
  t.time_ms = 120.0;
  t.before = Mode::NOp;
  t.event = EventKind::BlockageDetected;
  t.after = Mode::RBO;
  t.actions = {Action::switch_rx(BeamId{12}), Action::none()};
  CHECK(transitions_to_csv({t}) ==
        "time_ms,mode_before,event,mode_after,actions\n"
        "120.0,NOp,BlockageDetected,RBO,SwitchRxBeam(12);None\n");
}
