#include "groundwave/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "groundwave/angles.hpp"
#include "groundwave/errors.hpp"

namespace groundwave {

const char* to_string(Surface s) {
  switch (s) {
    case Surface::IndoorConcreteTile:
      return "indoor_concrete_tile";
    case Surface::OutdoorConcrete:
      return "outdoor_concrete";
    case Surface::OutdoorGravel:
      return "outdoor_gravel";
  }
  return "unknown";
}

Surface surface_from_string(std::string_view name) {
  for (Surface s : kAllSurfaces) {
    if (name == to_string(s)) {
      return s;
    }
  }
  throw FormatError("unknown surface '" + std::string(name) + "'");
}

void SurfaceProfile::validate() const {
  if (!(reflection_loss_db >= 0.0)) {
    throw InvalidArgument("reflection loss must be non-negative");
  }
}

void LinkBudget::validate() const {
  if (!(carrier_ghz > 0.0)) {
    throw InvalidArgument("carrier frequency must be positive");
  }
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(system_loss_db) ||
      !std::isfinite(noise_floor_dbm)) {
    throw InvalidArgument("link budget terms must be finite");
  }
}

double fspl(double distance_m, double frequency_ghz) {
  if (!(distance_m > 0.0) || !(frequency_ghz > 0.0)) {
    throw InvalidArgument("fspl needs positive distance and frequency");
  }
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_ghz * 1e9) +
         20.0 * std::log10(4.0 * std::numbers::pi / kSpeedOfLight);
}

double path_power(const LinkBudget& budget, const SurfaceProfile& surface, const Beam& tx_beam,
                  const Beam& rx_beam, const RayPath& path) {
  double p = budget.tx_power_dbm +
             gain(tx_beam, path.departure_azimuth_deg, path.departure_elevation_deg) +
             gain(rx_beam, path.arrival_azimuth_deg, path.arrival_elevation_deg) -
             fspl(path.length_m, budget.carrier_ghz) - budget.system_loss_db - path.excess_loss_db;
  if (path.kind == PathKind::GroundReflection) {
    p -= surface.reflection_loss_db;
  }
  return p;
}

double rss(const LinkBudget& budget, const SiteGeometry& geom, const SurfaceProfile& surface,
           const Beam& tx_beam, const Beam& rx_beam, const RayPath& path,
           const std::vector<Blocker>& blockers) {
  for (const Blocker& b : blockers) {
    if (is_blocked(geom, path, b)) {
      return budget.noise_floor_dbm;
    }
  }
  return std::max(budget.noise_floor_dbm, path_power(budget, surface, tx_beam, rx_beam, path));
}

Channel::Channel(SiteGeometry geom, SurfaceProfile surface, LinkBudget budget, Codebook tx,
                 Codebook rx, NlosConfig nlos)
    : geom_(geom), surface_(surface), budget_(budget), tx_(std::move(tx)), rx_(std::move(rx)) {
  geom_.validate();
  surface_.validate();
  budget_.validate();
  if (tx_.empty() || rx_.empty()) {
    throw ScenarioFault("channel needs non-empty Tx and Rx codebooks");
  }
  paths_.push_back(los_path(geom_));
  paths_.push_back(ground_reflection_path(geom_));
  if (nlos.enabled) {
    paths_.push_back(nlos_path(geom_, nlos.arrival_azimuth_deg, nlos.excess_loss_db));
  }
}

bool Channel::has_path(PathKind kind) const {
  return std::any_of(paths_.begin(), paths_.end(),
                     [kind](const RayPath& p) { return p.kind == kind; });
}

const RayPath& Channel::path(PathKind kind) const {
  for (const RayPath& p : paths_) {
    if (p.kind == kind) {
      return p;
    }
  }
  throw InvalidArgument(std::string("channel has no ") + to_string(kind) + " path");
}

const RayPath& Channel::dominant_path(BeamId tx, BeamId rx) const {
  const Beam& tb = tx_.at(tx);
  const Beam& rb = rx_.at(rx);
  const RayPath* best = &paths_.front();
  double best_power = path_power(budget_, surface_, tb, rb, *best);
  for (std::size_t i = 1; i < paths_.size(); ++i) {
    const double p = path_power(budget_, surface_, tb, rb, paths_[i]);
    if (p > best_power) {
      best_power = p;
      best = &paths_[i];
    }
  }
  return *best;
}

double Channel::link_rss(BeamId tx, BeamId rx, const std::vector<Blocker>& blockers) const {
  return rss(budget_, geom_, surface_, tx_.at(tx), rx_.at(rx), dominant_path(tx, rx), blockers);
}

bool Channel::los_blocked(const std::vector<Blocker>& blockers) const {
  const RayPath& los = path(PathKind::LoS);
  return std::any_of(blockers.begin(), blockers.end(),
                     [&](const Blocker& b) { return is_blocked(geom_, los, b); });
}

BeamId Channel::los_tx_beam() const {
  const RayPath& los = path(PathKind::LoS);
  return tx_.nearest(los.departure_azimuth_deg, los.departure_elevation_deg);
}

BeamId Channel::los_rx_beam() const {
  const RayPath& los = path(PathKind::LoS);
  return rx_.nearest(los.arrival_azimuth_deg, los.arrival_elevation_deg);
}

LinkSample measure(const Channel& channel, BeamId tx, BeamId rx,
                   const std::vector<Blocker>& blockers, double noise_sigma_db, Rng& rng,
                   double time_ms) {
  if (!(noise_sigma_db >= 0.0)) {
    throw InvalidArgument("noise sigma must be non-negative");
  }
  LinkSample s;
  s.time_ms = time_ms;
  s.tx_beam = tx;
  s.rx_beam = rx;
  s.blocked_los = channel.los_blocked(blockers);
  s.rss_dbm = channel.link_rss(tx, rx, blockers);
  if (noise_sigma_db > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma_db);
    s.rss_dbm = std::max(channel.budget().noise_floor_dbm, s.rss_dbm + noise(rng));
  }
  return s;
}

}  // namespace groundwave
