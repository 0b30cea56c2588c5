#include <doctest.h>

#include <algorithm>
#include <deque>
#include <functional>
#include <random>

#include "groundwave/baselines.hpp"
#include "groundwave/calibration.hpp"
#include "groundwave/errors.hpp"
#include "groundwave/policy.hpp"

using namespace groundwave;

namespace {

const SiteGeometry kSite{2.5, 1.0, 6.0, 20.0};

Codebook rx_codebook() {
  CodebookSpec s;
  s.el_beamwidth_deg = 36.0;
  s.elevation_rows_deg = {-30.0, 0.0, 30.0};
  return facing_rx_codebook(s, kSite);
}

LinkSample sample(BeamId rx, double rss) {
  LinkSample s;
  s.rx_beam = rx;
  s.rss_dbm = rss;
  return s;
}

struct Driver {
  Codebook cb = rx_codebook();
  std::unique_ptr<Policy> policy;
  std::function<double(BeamId)> field = [](BeamId) { return -60.0; };

  explicit Driver(PolicyKind kind, std::function<bool(BeamId)> sees_los = {}) {
    PolicyContext ctx;
    ctx.rx_codebook = &cb;
    ctx.geom = kSite;
    ctx.sees_los = std::move(sees_los);
    policy = make_policy(kind, ctx);
  }

  std::vector<Action> feed(const ProtocolEvent& ev) {
    std::vector<Action> out;
    std::deque<ProtocolEvent> q{ev};
    while (!q.empty()) {
      for (const Action& a : policy->handle(q.front())) {
        out.push_back(a);
        if (a.kind == ActionKind::ProbeBeam || a.kind == ActionKind::ProbeLoS) {
          q.push_back(ProtocolEvent::rss(sample(*a.beam, field(*a.beam))));
        }
      }
      q.pop_front();
    }
    return out;
  }

  BeamId b_rl() const { return cb.id_at(1, 12); }
};

std::size_t probes(const std::vector<Action>& v) {
  return static_cast<std::size_t>(std::count_if(
      v.begin(), v.end(), [](const Action& a) { return a.kind == ActionKind::ProbeBeam; }));
}

}  // namespace

TEST_CASE("access latency model") {
  const AccessModel m;
  CHECK(worst_case_discovery_latency(m) == 1280.0);
  CHECK(worst_case_discovery_latency({32, 10.0, 0.0}) == 320.0);
  BlockageEvent ev;
  ev.start_ms = 0.0;
  ev.duration_ms = 200.0;
  CHECK(handover_outage(m, ev) == doctest::Approx(1790.0));
  CHECK(handover_outage(m, ev) >= 1780.0);
  ev.duration_ms = 5.0;
  CHECK(handover_outage(m, ev) == doctest::Approx(1785.0));
  CHECK_THROWS_AS(worst_case_discovery_latency({0, 20.0, 500.0}), InvalidArgument);
  CHECK_THROWS_AS(worst_case_discovery_latency({64, 0.0, 500.0}), InvalidArgument);
  CHECK_THROWS_AS(handover_outage(m, ev, -1.0), InvalidArgument);
}

TEST_CASE("exhaustive scan measures every beam once") {
  const Codebook cb = rx_codebook();
  std::size_t calls = 0;
  const ScanResult r = exhaustive_scan(cb, [&](BeamId b) {
    ++calls;
    return b == BeamId{40} ? -50.0 : -70.0;
  });
  CHECK(calls == 75);
  CHECK(r.measurements == 75);
  CHECK(r.beam == BeamId{40});
  CHECK(r.rss_dbm == -50.0);

  const auto row = row_beams(cb, cb.id_at(1, 12));
  CHECK(exhaustive_scan(row, [](BeamId) { return -65.0; }).measurements == 25);
  CHECK(exhaustive_scan(row, [](BeamId) { return -65.0; }).beam == row.front());
  CHECK_THROWS_AS(exhaustive_scan(std::vector<BeamId>{}, [](BeamId) { return 0.0; }),
                  InvalidArgument);
}

TEST_CASE("exhaustive scan agrees with a plain argmax") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(-80, -50);  // integer levels force ties
  const Codebook cb = rx_codebook();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> field(cb.size());
    for (double& v : field) v = level(rng);
    std::size_t best = 0;
    for (std::size_t i = 1; i < field.size(); ++i) {
      if (field[i] > field[best]) best = i;
    }
    const ScanResult r = exhaustive_scan(cb, [&](BeamId b) { return field[b.value]; });
    CHECK(r.beam.value == best);
    CHECK(r.rss_dbm == field[best]);
  }
}

TEST_CASE("policy names round trip") {
  for (PolicyKind k : kAllPolicies) {
    CHECK(policy_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(policy_from_string("beamspy"), InvalidArgument);
}

TEST_CASE("make_policy needs a codebook") {
  PolicyContext ctx;
  CHECK_THROWS_AS(make_policy(PolicyKind::Handover, ctx), ScenarioFault);
}

TEST_CASE("exhaustive policy scans the serving row on blockage") {
  Driver d(PolicyKind::ExhaustiveScan);
  d.feed(ProtocolEvent::rss(sample(d.b_rl(), -60.0)));
  CHECK(d.policy->attached());
  const BeamId side = d.cb.id_at(1, 20);
  d.field = [&](BeamId b) { return b == side ? -66.0 : -78.0; };
  const auto acts = d.feed(ProtocolEvent::blockage());
  CHECK(probes(acts) == 25);
  CHECK(acts.back() == Action::switch_rx(side));
  CHECK(d.policy->mode_name() == "BACKUP");
  CHECK(d.policy->rx_beam() == side);
  CHECK(d.policy->counters().discovery_measurements == 25);
  CHECK(d.policy->counters().discovery_episodes == 1);

  d.field = [](BeamId) { return -60.0; };
  const auto back = d.feed(ProtocolEvent::timer(100.0));
  CHECK(back.back() == Action::switch_rx(d.b_rl()));
  CHECK(d.policy->mode_name() == "NOp");
}

TEST_CASE("exhaustive policy falls back to access when nothing is heard") {
  Driver d(PolicyKind::ExhaustiveScan);
  d.feed(ProtocolEvent::rss(sample(d.b_rl(), -60.0)));
  d.field = [](BeamId) { return -78.0; };
  const auto acts = d.feed(ProtocolEvent::blockage());
  CHECK(acts.back() == Action::request_access());
  CHECK_FALSE(d.policy->attached());
}

TEST_CASE("scan-plus-model stores a non-LoS backup at attach") {
  Driver probe_side(PolicyKind::ScanPlusModel);
  const BeamId los = probe_side.b_rl();
  const BeamId side = probe_side.cb.id_at(1, 4);
  Driver d(PolicyKind::ScanPlusModel, [los](BeamId b) { return b == los; });
  d.field = [&](BeamId b) {
    if (b == los) return -60.0;
    return b == side ? -68.0 : -78.0;
  };
  const auto attach = d.feed(ProtocolEvent::rss(sample(los, -60.0)));
  CHECK(attach.front() == Action::switch_rx(los));
  CHECK(probes(attach) == 25);
  CHECK(d.policy->mode_name() == "NOp");
  // Blockage costs no measurements: the stored beam is used directly.
  const auto on_block = d.feed(ProtocolEvent::blockage());
  CHECK(on_block == std::vector<Action>{Action::switch_rx(side)});
  CHECK(d.policy->counters().discovery_measurements == 25);
}

TEST_CASE("handover policy always requests access") {
  Driver d(PolicyKind::Handover);
  CHECK(d.feed(ProtocolEvent::rss(sample(d.b_rl(), -80.0))) == std::vector<Action>{Action::none()});
  CHECK(d.feed(ProtocolEvent::rss(sample(d.b_rl(), -60.0))) ==
        std::vector<Action>{Action::switch_rx(d.b_rl())});
  CHECK(d.feed(ProtocolEvent::blockage()) == std::vector<Action>{Action::request_access()});
  CHECK_FALSE(d.policy->attached());
}

TEST_CASE("ground-reflection policy counts discovery and alignment probes separately") {
  Driver d(PolicyKind::GroundReflection);
  d.field = [&](BeamId b) { return d.cb.row_of(b) == 0 ? -64.0 : -70.0; };
  d.feed(ProtocolEvent::rss(sample(d.b_rl(), -60.0)));
  d.feed(ProtocolEvent::rss(sample(d.b_rl(), -60.0)));
  CHECK(d.policy->counters().discovery_episodes == 1);
  CHECK(d.policy->counters().discovery_measurements == 3);
  d.feed(ProtocolEvent::alignment());
  CHECK(d.policy->counters().alignment_measurements == 2);
  CHECK(d.policy->counters().discovery_measurements == 3);
  REQUIRE(d.policy->fsm_state() != nullptr);
  CHECK(d.policy->fsm_state()->gr_beam.has_value());
}
