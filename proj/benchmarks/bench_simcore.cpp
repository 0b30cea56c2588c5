#include <benchmark/benchmark.h>

#include "groundwave/calibration.hpp"
#include "groundwave/simcore.hpp"

using namespace groundwave;

namespace {

const Calibration& calibration() {
  static const Calibration cal = [] {
    CalibrationSetup setup;
    setup.geom = SiteGeometry{2.5, 1.0, 6.0, 0.0};
    setup.rx_spec.el_beamwidth_deg = 36.0;
    setup.rx_spec.elevation_rows_deg = {-30.0, 0.0, 30.0};
    return calibrate(LinkBudget{}, setup, reference_targets());
  }();
  return cal;
}

void BM_LinkRss(benchmark::State& state) {
  const Scenario sc = build_scenario(ScenarioConfig{}, calibration());
  const BeamId tx = sc.channel.los_tx_beam();
  const BeamId rx = sc.channel.los_rx_beam();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sc.channel.link_rss(tx, rx, {}));
  }
}
BENCHMARK(BM_LinkRss);

void BM_Calibrate(benchmark::State& state) {
  CalibrationSetup setup;
  setup.geom = SiteGeometry{2.5, 1.0, 6.0, 0.0};
  setup.rx_spec.el_beamwidth_deg = 36.0;
  setup.rx_spec.elevation_rows_deg = {-30.0, 0.0, 30.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate(LinkBudget{}, setup, reference_targets()));
  }
}
BENCHMARK(BM_Calibrate);

void BM_RunMinute(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.policy = static_cast<PolicyKind>(state.range(0));
  const Scenario sc = build_scenario(cfg, calibration());
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(sc));
  }
  state.SetLabel(to_string(cfg.policy));
}
BENCHMARK(BM_RunMinute)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
