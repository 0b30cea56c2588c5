#include "groundwave/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <sstream>
#include <thread>

#include "groundwave/errors.hpp"

namespace groundwave {
namespace {

constexpr std::size_t kMaxActionsPerStep = 10'000;

std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

// Covered = the beam's gain toward the LoS direction is within 3 dB of peak.
void require_los_coverage(const Codebook& cb, BeamId id, double az, double el, const char* side) {
  const Beam& b = cb.at(id);
  if (gain(b, az, el) < b.peak_gain_db - 3.0) {
    throw ScenarioFault(std::string(side) + " codebook has no beam covering the LoS direction");
  }
}

class Simulator {
 public:
  explicit Simulator(const Scenario& sc)
      : sc_(sc),
        cfg_(sc.config),
        ch_(sc.channel),
        noise_rng_(derive_seed(cfg_.seed, 0x6e6f697365ULL) ^ 0x9e3779b97f4a7c15ULL),
        tx_(ch_.los_tx_beam()),
        rx_los_(ch_.los_rx_beam()),
        threshold_(cfg_.protocol.blockage_threshold_dbm()) {
    PolicyContext ctx;
    ctx.rx_codebook = &ch_.rx_codebook();
    ctx.geom = ch_.geometry();
    ctx.protocol = cfg_.protocol;
    ctx.sees_los = [this](BeamId rx) { return ch_.dominant_path(tx_, rx).kind == PathKind::LoS; };
    policy_ = make_policy(cfg_.policy, ctx);
    metrics_.policy = cfg_.policy;
    metrics_.seed = cfg_.seed;
    metrics_.horizon_ms = cfg_.horizon_ms;
    metrics_.n_blockage_events = sc.events.size();
    for (const auto& ev : sc.events) {
      metrics_.events.push_back(
          EventOutcome{ev.start_ms, ev.duration_ms, ev.blocker.distance_from_rx_m, true, 0.0});
    }
  }

  RunMetrics run() {
    const double dt = cfg_.probe_interval_ms;
    const auto n_steps = static_cast<std::size_t>(std::floor(cfg_.horizon_ms / dt + 1e-9));
    double blocked_rss_sum = 0.0;
    std::size_t blocked_steps = 0;
    for (std::size_t k = 0; k < n_steps; ++k) {
      t_ = static_cast<double>(k) * dt;
      blockers_ = active_blockers(sc_.events, t_);
      if (k > 0) {
        deliver(ProtocolEvent::timer(dt));
      }
      std::optional<LinkSample> serving;
      if (awaiting_access_) {
        if (t_ >= access_ready_ms_) {
          deliver(ProtocolEvent::rss(sample(rx_los_)));
          if (policy_->attached()) {
            awaiting_access_ = false;
            history_.clear();
          } else {
            start_access();
          }
        }
      } else {
        serving = sample(policy_->rx_beam());
        deliver(ProtocolEvent::rss(*serving));
        if (!awaiting_access_) {
          if (detect_blockage({*serving}, cfg_.protocol.detection_margin_db,
                              cfg_.protocol.noise_floor_dbm)) {
            if (!open_record_) {
              open_record(t_);
            }
            deliver(ProtocolEvent::blockage());
          } else if (policy_->tracking()) {
            track_alignment(*serving);
          }
        }
      }

      double delivered = cfg_.budget.noise_floor_dbm;
      if (!awaiting_access_ && policy_->attached()) {
        const BeamId active = policy_->rx_beam();
        delivered = (serving && serving->rx_beam == active && !beam_switched_)
                        ? serving->rss_dbm
                        : sample(active).rss_dbm;
      }
      beam_switched_ = false;
      account(delivered, blocked_rss_sum, blocked_steps);
    }
    const PolicyCounters& c = policy_->counters();
    metrics_.discovery_episodes = c.discovery_episodes;
    metrics_.discovery_measurements = c.discovery_measurements;
    metrics_.alignment_measurements = c.alignment_measurements;
    metrics_.los_probes = c.los_probes;
    metrics_.grd_impossible = policy_->grd_impossible();
    metrics_.mean_rss_during_blockage_dbm =
        blocked_steps ? blocked_rss_sum / static_cast<double>(blocked_steps)
                      : cfg_.budget.noise_floor_dbm;
    for (const auto& ev : metrics_.events) {
      metrics_.n_events_survived += ev.survived ? 1 : 0;
    }
    return std::move(metrics_);
  }

 private:
  LinkSample sample(BeamId rx) {
    return measure(ch_, tx_, rx, blockers_, cfg_.noise_sigma_db, noise_rng_, t_);
  }

  void deliver(const ProtocolEvent& first) {
    std::deque<ProtocolEvent> pending{first};
    std::size_t handled = 0;
    while (!pending.empty()) {
      if (++handled > kMaxActionsPerStep) {
        throw ScenarioFault("policy did not settle within one simulation step");
      }
      const ProtocolEvent ev = pending.front();
      pending.pop_front();
      const Mode mode_before = mode_of(policy_.get());
      std::vector<Action> actions = policy_->handle(ev);
      if (cfg_.record_transitions && policy_->fsm_state()) {
        metrics_.transitions.push_back(
            Transition{t_, mode_before, ev.kind, policy_->fsm_state()->mode, actions});
      }
      for (const Action& a : actions) {
        switch (a.kind) {
          case ActionKind::ProbeBeam:
          case ActionKind::ProbeLoS:
            pending.push_back(ProtocolEvent::rss(sample(*a.beam)));
            break;
          case ActionKind::SwitchRxBeam:
            beam_switched_ = true;
            history_.clear();
            break;
          case ActionKind::RequestInitialAccess:
            start_access();
            break;
          case ActionKind::StoreGrBeam:
          case ActionKind::None:
            break;
        }
      }
    }
  }

  static Mode mode_of(const Policy* p) {
    return p->fsm_state() ? p->fsm_state()->mode : Mode::IA;
  }

  void start_access() {
    awaiting_access_ = true;
    access_ready_ms_ = t_ + worst_case_discovery_latency(cfg_.access) + cfg_.access.attach_overhead_ms;
    ++metrics_.reacquisitions;
    metrics_.reacquisition_measurements += cfg_.access.n_sweep_beams;
    if (!open_record_) {
      open_record(t_);
    }
    history_.clear();
  }

  void open_record(double t) {
    // Attribute the interruption to the most recent event that has started.
    double start = t;
    for (const auto& ev : sc_.events) {
      if (ev.start_ms <= t) {
        start = ev.start_ms;
      } else {
        break;
      }
    }
    open_record_ = true;
    record_origin_ms_ = std::max(start, last_restore_ms_);
    ++metrics_.n_interruptions;
  }

  void track_alignment(const LinkSample& s) {
    history_.push_back(s.rss_dbm);
    if (history_.size() > cfg_.ba_window) {
      history_.pop_front();
    }
    if (history_.size() < 2) {
      return;
    }
    const double peak = *std::max_element(history_.begin(), history_.end());
    if (s.rss_dbm <= peak - cfg_.ba_drop_db) {
      history_.clear();
      deliver(ProtocolEvent::alignment());
    }
  }

  void account(double delivered, double& blocked_sum, std::size_t& blocked_steps) {
    const double dt = cfg_.probe_interval_ms;
    const bool ok = delivered >= threshold_;
    if (!ok) {
      metrics_.total_outage_ms += dt;
    }
    if (ok && open_record_) {
      open_record_ = false;
      metrics_.recovery_latency_ms.push_back(t_ - record_origin_ms_);
      last_restore_ms_ = t_;
    }
    if (ch_.los_blocked(blockers_)) {
      blocked_sum += delivered;
      ++blocked_steps;
    }
    for (std::size_t i = 0; i < sc_.events.size(); ++i) {
      if (sc_.events[i].active_at(t_) && !ok) {
        metrics_.events[i].survived = false;
        metrics_.events[i].outage_ms += dt;
      }
    }
    if (cfg_.record_trace) {
      metrics_.rss_trace.push_back(TracePoint{t_, delivered, policy_->mode_name()});
    }
  }

  const Scenario& sc_;
  const ScenarioConfig& cfg_;
  const Channel& ch_;
  Rng noise_rng_;
  BeamId tx_;
  BeamId rx_los_;
  double threshold_;
  std::unique_ptr<Policy> policy_;
  RunMetrics metrics_;

  double t_ = 0.0;
  std::vector<Blocker> blockers_;
  bool awaiting_access_ = true;
  double access_ready_ms_ = 0.0;
  bool beam_switched_ = false;
  std::deque<double> history_;
  bool open_record_ = false;
  double record_origin_ms_ = 0.0;
  double last_restore_ms_ = 0.0;
};

void apply_parameter(ScenarioConfig& cfg, const std::string& name, double v) {
  if (name == "tilt_deg") {
    cfg.geom.tilt_tx_deg = v;
  } else if (name == "d_tr_m") {
    cfg.geom.d_tr_m = v;
  } else if (name == "h_tx_m") {
    cfg.geom.h_tx_m = v;
  } else if (name == "h_rx_m") {
    cfg.geom.h_rx_m = v;
  } else if (name == "rate_per_s") {
    cfg.blockage.rate_per_s = v;
  } else if (name == "noise_sigma_db") {
    cfg.noise_sigma_db = v;
  } else if (name == "probe_interval_ms") {
    cfg.probe_interval_ms = v;
  } else if (name == "horizon_ms") {
    cfg.horizon_ms = v;
  } else {
    throw InvalidArgument("cannot sweep unknown parameter '" + name + "'");
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  geom.validate();
  budget.validate();
  access.validate();
  if (!(horizon_ms > 0.0) || !(probe_interval_ms > 0.0)) {
    throw ScenarioFault("horizon and probe interval must be positive");
  }
  if (horizon_ms < probe_interval_ms) {
    throw ScenarioFault("horizon is shorter than one probe interval");
  }
  if (!(noise_sigma_db >= 0.0)) {
    throw ScenarioFault("noise sigma must be non-negative");
  }
  if (ba_window < 2 || !(ba_drop_db > 0.0)) {
    throw ScenarioFault("alignment window needs >= 2 samples and a positive drop");
  }
  if (!(protocol.rbo_period_ms > 0.0) || !(protocol.detection_margin_db >= 0.0) ||
      !(protocol.hysteresis_db >= 0.0)) {
    throw ScenarioFault("protocol timing and margins must be non-negative");
  }
  try {
    blockage.validate(horizon_ms);
  } catch (const InvalidArgument& e) {
    throw ScenarioFault(e.what());
  }
}

double RunMetrics::measurements_per_episode() const {
  if (discovery_episodes > 0) {
    return static_cast<double>(discovery_measurements) / static_cast<double>(discovery_episodes);
  }
  if (reacquisitions > 0) {
    return static_cast<double>(reacquisition_measurements) / static_cast<double>(reacquisitions);
  }
  return 0.0;
}

Scenario build_scenario(const ScenarioConfig& in, const Calibration& cal) {
  ScenarioConfig cfg = in;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ScenarioFault(e.what());
  } catch (const InvalidGeometry& e) {
    throw ScenarioFault(e.what());
  }
  cfg.budget = cal.apply(cfg.budget);
  cfg.protocol.noise_floor_dbm = cfg.budget.noise_floor_dbm;
  cfg.protocol.tx_el_beamwidth_deg = cfg.tx_codebook.el_beamwidth_deg;
  const SurfaceProfile surface = cal.profile(cfg.surface);

  Codebook tx;
  Codebook rx;
  try {
    tx = tilted_tx_codebook(cfg.tx_codebook, cfg.geom.tilt_tx_deg);
    rx = facing_rx_codebook(cfg.rx_codebook, cfg.geom);
  } catch (const InvalidArgument& e) {
    throw ScenarioFault(std::string("codebook: ") + e.what());
  }
  Channel channel(cfg.geom, surface, cfg.budget, std::move(tx), std::move(rx), cfg.nlos);
  const RayPath& los = channel.path(PathKind::LoS);
  require_los_coverage(channel.tx_codebook(), channel.los_tx_beam(), los.departure_azimuth_deg,
                       los.departure_elevation_deg, "transmit");
  require_los_coverage(channel.rx_codebook(), channel.los_rx_beam(), los.arrival_azimuth_deg,
                       los.arrival_elevation_deg, "receive");

  std::vector<BlockageEvent> events;
  if (cfg.events) {
    events = *cfg.events;
    for (const auto& ev : events) {
      ev.validate();
    }
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
      return a.start_ms < b.start_ms;
    });
  } else {
    Rng event_rng(cfg.seed);
    events = generate_events(cfg.horizon_ms, cfg.blockage, cfg.geom, event_rng);
  }
  return Scenario{std::move(cfg), std::move(channel), std::move(events)};
}

RunMetrics run(const Scenario& scenario) { return Simulator(scenario).run(); }

RunMetrics run(const ScenarioConfig& cfg, const Calibration& cal) {
  return run(build_scenario(cfg, cal));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base ^ fmix64(index); }

std::vector<SweepPoint> sweep(const ScenarioConfig& base, const Calibration& cal,
                              const std::vector<SweepAxis>& grid, bool parallel) {
  if (grid.empty()) {
    throw InvalidArgument("sweep grid must have at least one axis");
  }
  std::size_t total = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw InvalidArgument("sweep axis '" + axis.parameter + "' has no values");
    }
    total *= axis.values.size();
  }
  std::vector<SweepPoint> points(total);
  std::vector<std::string> labels(total);
  for (std::size_t i = 0; i < total; ++i) {
    ScenarioConfig cfg = base;
    std::size_t rem = i;
    std::string label;
    for (std::size_t a = grid.size(); a-- > 0;) {
      const auto& axis = grid[a];
      const double v = axis.values[rem % axis.values.size()];
      apply_parameter(cfg, axis.parameter, v);
      std::ostringstream part;
      part << axis.parameter << '=' << v;
      label = part.str() + (label.empty() ? "" : ", ") + label;
      rem /= axis.values.size();
    }
    labels[i] = std::move(label);
    cfg.seed = derive_seed(base.seed, i);
    points[i].index = i;
    points[i].config = std::move(cfg);
  }

  auto run_point = [&cal, &labels](SweepPoint& p) {
    try {
      p.metrics = run(p.config, cal);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "sweep point " << p.index << " (" << labels[p.index] << ", seed=" << p.config.seed
          << "): " << e.what();
      throw ScenarioFault(msg.str());
    }
  };
  if (!parallel || total == 1) {
    for (auto& p : points) {
      run_point(p);
    }
    return points;
  }
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < total; first += width) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = first; i < std::min(total, first + width); ++i) {
      jobs.push_back(std::async(std::launch::async, run_point, std::ref(points[i])));
    }
    for (auto& j : jobs) {
      j.get();
    }
  }
  return points;
}

}  // namespace groundwave
