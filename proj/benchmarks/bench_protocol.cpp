#include <benchmark/benchmark.h>

#include "groundwave/calibration.hpp"
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

LinkSample sample(BeamId b, double v) {
  LinkSample s;
  s.rx_beam = b;
  s.rss_dbm = v;
  return s;
}

void BM_StepServingSample(benchmark::State& state) {
  const Codebook cb = rx_codebook();
  ProtocolState st = step({}, ProtocolEvent::rss(sample(cb.id_at(1, 12), -60.0)), cb, kSite).state;
  st.grd_pending = false;
  const ProtocolEvent ev = ProtocolEvent::rss(sample(cb.id_at(1, 12), -60.5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(step(st, ev, cb, kSite));
  }
}
BENCHMARK(BM_StepServingSample);

void BM_GrdEpisode(benchmark::State& state) {
  const Codebook cb = rx_codebook();
  const BeamId b_rl = cb.id_at(1, 12);
  const ProtocolState attached = step({}, ProtocolEvent::rss(sample(b_rl, -60.0)), cb, kSite).state;
  for (auto _ : state) {
    ProtocolState st = step(attached, ProtocolEvent::rss(sample(b_rl, -60.0)), cb, kSite).state;
    for (BeamId b : {cb.id_at(0, 12), cb.id_at(2, 12), cb.id_at(0, 12)}) {
      st = step(st, ProtocolEvent::rss(sample(b, -64.0)), cb, kSite).state;
    }
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_GrdEpisode);

}  // namespace
