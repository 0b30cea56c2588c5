#include "groundwave/policy.hpp"

#include <algorithm>
#include <map>

#include "groundwave/errors.hpp"

namespace groundwave {
namespace {

class GroundReflectionPolicy final : public Policy {
 public:
  explicit GroundReflectionPolicy(const PolicyContext& ctx) : ctx_(ctx) {}

  PolicyKind kind() const override { return PolicyKind::GroundReflection; }
  std::string mode_name() const override { return to_string(state_.mode); }
  bool attached() const override { return state_.mode != Mode::IA; }
  BeamId rx_beam() const override { return state_.active_rx_beam(); }
  bool tracking() const override { return state_.mode == Mode::NOp; }
  bool grd_impossible() const override { return state_.grd_impossible; }
  const ProtocolState* fsm_state() const override { return &state_; }

  std::vector<Action> handle(const ProtocolEvent& ev) override {
    StepResult r = step(state_, ev, *ctx_.rx_codebook, ctx_.geom, ctx_.protocol);
    if (state_.mode != Mode::GRD && r.state.mode == Mode::GRD) {
      ++counters_.discovery_episodes;
    }
    for (const Action& a : r.actions) {
      if (a.kind == ActionKind::ProbeBeam) {
        if (r.state.mode == Mode::GRD) {
          ++counters_.discovery_measurements;
        } else if (r.state.mode == Mode::BA) {
          ++counters_.alignment_measurements;
        }
      } else if (a.kind == ActionKind::ProbeLoS) {
        ++counters_.los_probes;
      }
    }
    state_ = std::move(r.state);
    return std::move(r.actions);
  }

 private:
  PolicyContext ctx_;
  ProtocolState state_;
};

// Shared skeleton for comparators that recover onto some stored or scanned
// backup beam and return to LoS with the same timer/hysteresis rule as RBO.
class BackupPolicy : public Policy {
 public:
  explicit BackupPolicy(const PolicyContext& ctx) : ctx_(ctx) {}

  std::string mode_name() const override {
    switch (mode_) {
      case M::IA:
        return "IA";
      case M::NOp:
        return "NOp";
      case M::Scan:
        return "SCAN";
      case M::Backup:
        return "BACKUP";
    }
    return "?";
  }
  bool attached() const override { return mode_ != M::IA; }
  BeamId rx_beam() const override { return mode_ == M::Backup ? backup_ : b_rl_; }
  bool tracking() const override { return mode_ == M::NOp; }

  std::vector<Action> handle(const ProtocolEvent& ev) override {
    switch (mode_) {
      case M::IA:
        return on_ia(ev);
      case M::NOp:
        if (ev.kind == EventKind::BlockageDetected) {
          return on_blockage();
        }
        break;
      case M::Scan:
        if (ev.kind == EventKind::RssSample) {
          return on_scan_sample(ev.sample);
        }
        break;
      case M::Backup:
        return on_backup(ev);
    }
    return {Action::none()};
  }

 protected:
  enum class M { IA, NOp, Scan, Backup };

  virtual std::vector<Action> on_attach() { return {Action::switch_rx(b_rl_)}; }
  virtual std::vector<Action> on_blockage() = 0;
  virtual std::vector<Action> on_scan_done(const std::map<BeamId, double>& results) = 0;

  double threshold() const { return ctx_.protocol.blockage_threshold_dbm(); }

  std::vector<Action> start_scan() {
    mode_ = M::Scan;
    scan_plan_ = row_beams(*ctx_.rx_codebook, b_rl_);
    scan_results_.clear();
    ++counters_.discovery_episodes;
    ++counters_.discovery_measurements;
    return {Action::probe(scan_plan_.front())};
  }

  std::vector<Action> enter_backup(BeamId beam, double rss) {
    mode_ = M::Backup;
    backup_ = beam;
    backup_rss_ = rss;
    timer_ = ctx_.protocol.rbo_period_ms;
    los_probe_pending_ = false;
    return {Action::switch_rx(beam)};
  }

  std::vector<Action> fall_back_to_access() {
    mode_ = M::IA;
    return {Action::request_access()};
  }

  PolicyContext ctx_;
  M mode_ = M::IA;
  BeamId b_rl_;
  BeamId backup_;
  double backup_rss_ = 0.0;

 private:
  std::vector<Action> on_ia(const ProtocolEvent& ev) {
    if (ev.kind != EventKind::RssSample || ev.sample.rss_dbm <= threshold()) {
      return {Action::none()};
    }
    b_rl_ = ev.sample.rx_beam;
    mode_ = M::NOp;
    return on_attach();
  }

  std::vector<Action> on_scan_sample(const LinkSample& s) {
    const std::size_t done = scan_results_.size();
    if (done >= scan_plan_.size() || s.rx_beam != scan_plan_[done]) {
      return {Action::none()};
    }
    scan_results_[s.rx_beam] = s.rss_dbm;
    if (done + 1 < scan_plan_.size()) {
      ++counters_.discovery_measurements;
      return {Action::probe(scan_plan_[done + 1])};
    }
    return on_scan_done(scan_results_);
  }

  std::vector<Action> on_backup(const ProtocolEvent& ev) {
    switch (ev.kind) {
      case EventKind::Timer:
        if (los_probe_pending_) {
          break;
        }
        timer_ = std::max(0.0, timer_ - ev.elapsed_ms);
        if (timer_ > 0.0) {
          break;
        }
        los_probe_pending_ = true;
        ++counters_.los_probes;
        return {Action::probe_los(b_rl_)};
      case EventKind::RssSample:
        if (!los_probe_pending_ || ev.sample.rx_beam != b_rl_) {
          break;
        }
        los_probe_pending_ = false;
        if (ev.sample.rss_dbm >= backup_rss_ + ctx_.protocol.hysteresis_db) {
          mode_ = M::NOp;
          return {Action::switch_rx(b_rl_)};
        }
        timer_ = ctx_.protocol.rbo_period_ms;
        break;
      case EventKind::LosRestored:
        mode_ = M::NOp;
        los_probe_pending_ = false;
        return {Action::switch_rx(b_rl_)};
      case EventKind::BlockageDetected:
      case EventKind::AlignmentNeeded:
        break;
    }
    return {Action::none()};
  }

  std::vector<BeamId> scan_plan_;
  std::map<BeamId, double> scan_results_;
  double timer_ = 0.0;
  bool los_probe_pending_ = false;
};

// Unblock-style: sweep the whole azimuth row once LoS is lost.
class ExhaustiveScanPolicy final : public BackupPolicy {
 public:
  using BackupPolicy::BackupPolicy;
  PolicyKind kind() const override { return PolicyKind::ExhaustiveScan; }

 protected:
  std::vector<Action> on_blockage() override { return start_scan(); }

  std::vector<Action> on_scan_done(const std::map<BeamId, double>& results) override {
    std::vector<BeamId> beams;
    for (const auto& [b, v] : results) {
      beams.push_back(b);
    }
    const ScanResult best = exhaustive_scan(beams, [&](BeamId b) { return results.at(b); });
    if (best.rss_dbm > threshold()) {
      return enter_backup(best.beam, best.rss_dbm);
    }
    return fall_back_to_access();
  }
};

// BeamSpy-style stand-in: one sweep at attach, a model picks the backup.
class ScanPlusModelPolicy final : public BackupPolicy {
 public:
  using BackupPolicy::BackupPolicy;
  PolicyKind kind() const override { return PolicyKind::ScanPlusModel; }

 protected:
  std::vector<Action> on_attach() override {
    has_backup_ = false;
    std::vector<Action> out{Action::switch_rx(b_rl_)};
    for (const Action& a : start_scan()) {
      out.push_back(a);
    }
    return out;
  }

  std::vector<Action> on_blockage() override {
    if (!has_backup_) {
      return fall_back_to_access();
    }
    return enter_backup(stored_, stored_rss_);
  }

  std::vector<Action> on_scan_done(const std::map<BeamId, double>& results) override {
    mode_ = M::NOp;
    has_backup_ = false;
    for (const auto& [b, v] : results) {
      if (ctx_.sees_los && ctx_.sees_los(b)) {
        continue;
      }
      if (v > threshold() && (!has_backup_ || v > stored_rss_)) {
        has_backup_ = true;
        stored_ = b;
        stored_rss_ = v;
      }
    }
    return {Action::none()};
  }

 private:
  bool has_backup_ = false;
  BeamId stored_;
  double stored_rss_ = 0.0;
};

// Drop the link and go through initial access again.
class HandoverPolicy final : public Policy {
 public:
  explicit HandoverPolicy(const PolicyContext& ctx) : ctx_(ctx) {}

  PolicyKind kind() const override { return PolicyKind::Handover; }
  std::string mode_name() const override { return attached_ ? "NOp" : "IA"; }
  bool attached() const override { return attached_; }
  BeamId rx_beam() const override { return b_rl_; }
  bool tracking() const override { return attached_; }

  std::vector<Action> handle(const ProtocolEvent& ev) override {
    if (!attached_) {
      if (ev.kind == EventKind::RssSample &&
          ev.sample.rss_dbm > ctx_.protocol.blockage_threshold_dbm()) {
        attached_ = true;
        b_rl_ = ev.sample.rx_beam;
        return {Action::switch_rx(b_rl_)};
      }
    } else if (ev.kind == EventKind::BlockageDetected) {
      attached_ = false;
      return {Action::request_access()};
    }
    return {Action::none()};
  }

 private:
  PolicyContext ctx_;
  bool attached_ = false;
  BeamId b_rl_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(PolicyKind kind, const PolicyContext& ctx) {
  if (ctx.rx_codebook == nullptr || ctx.rx_codebook->empty()) {
    throw ScenarioFault("policy needs a receive codebook");
  }
  switch (kind) {
    case PolicyKind::GroundReflection:
      return std::make_unique<GroundReflectionPolicy>(ctx);
    case PolicyKind::ExhaustiveScan:
      return std::make_unique<ExhaustiveScanPolicy>(ctx);
    case PolicyKind::ScanPlusModel:
      return std::make_unique<ScanPlusModelPolicy>(ctx);
    case PolicyKind::Handover:
      return std::make_unique<HandoverPolicy>(ctx);
  }
  throw InvalidArgument("unknown policy kind");
}

}  // namespace groundwave
