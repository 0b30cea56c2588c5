#pragma once

// Link budget and RSS model.
//
// A beam pair is modeled as locking onto whichever propagation path it
// receives most strongly (its dominant path). When a blocker cuts that path
// the receiver reports the noise floor, even if a weaker path is still open.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "groundwave/antenna.hpp"
#include "groundwave/geometry.hpp"

namespace groundwave {

using Rng = std::mt19937_64;

enum class Surface { IndoorConcreteTile, OutdoorConcrete, OutdoorGravel };

inline constexpr Surface kAllSurfaces[] = {Surface::IndoorConcreteTile, Surface::OutdoorConcrete,
                                           Surface::OutdoorGravel};

const char* to_string(Surface s);
/// Accepts the names produced by to_string; throws FormatError otherwise.
Surface surface_from_string(std::string_view name);

struct SurfaceProfile {
  Surface name = Surface::OutdoorConcrete;
  double reflection_loss_db = 0.0;

  void validate() const;

  bool operator==(const SurfaceProfile&) const = default;
};

struct LinkBudget {
  double tx_power_dbm = 20.0;
  double system_loss_db = 0.0;
  double noise_floor_dbm = -78.0;
  double carrier_ghz = 60.0;

  void validate() const;

  bool operator==(const LinkBudget&) const = default;
};

struct LinkSample {
  double time_ms = 0.0;
  BeamId tx_beam;
  BeamId rx_beam;
  double rss_dbm = 0.0;
  bool blocked_los = false;

  bool operator==(const LinkSample&) const = default;
};

/// Free-space path loss in dB; throws InvalidArgument on non-positive input.
double fspl(double distance_m, double frequency_ghz);

/// Received power over one path with no blockage and no floor applied.
double path_power(const LinkBudget& budget, const SurfaceProfile& surface, const Beam& tx_beam,
                  const Beam& rx_beam, const RayPath& path);

/// Single-path RSS: the noise floor when any blocker cuts `path`, otherwise
/// path_power floored at the noise floor.
double rss(const LinkBudget& budget, const SiteGeometry& geom, const SurfaceProfile& surface,
           const Beam& tx_beam, const Beam& rx_beam, const RayPath& path,
           const std::vector<Blocker>& blockers);

/// Optional synthetic scatterer path.
struct NlosConfig {
  bool enabled = true;
  double arrival_azimuth_deg = 38.4;
  double excess_loss_db = 10.0;

  bool operator==(const NlosConfig&) const = default;
};

/// A calibrated scene plus both codebooks: everything needed to turn a beam
/// pair and a set of blockers into an RSS reading.
class Channel {
 public:
  Channel(SiteGeometry geom, SurfaceProfile surface, LinkBudget budget, Codebook tx, Codebook rx,
          NlosConfig nlos = {});

  const SiteGeometry& geometry() const { return geom_; }
  const SurfaceProfile& surface() const { return surface_; }
  const LinkBudget& budget() const { return budget_; }
  const Codebook& tx_codebook() const { return tx_; }
  const Codebook& rx_codebook() const { return rx_; }
  const std::vector<RayPath>& paths() const { return paths_; }
  const RayPath& path(PathKind kind) const;
  bool has_path(PathKind kind) const;

  /// Path with the highest unblocked power for this beam pair; ties keep
  /// the earlier path (LoS, then GR, then NLoS).
  const RayPath& dominant_path(BeamId tx, BeamId rx) const;

  /// Noise-free reading under the dominant-path model.
  double link_rss(BeamId tx, BeamId rx, const std::vector<Blocker>& blockers) const;

  bool los_blocked(const std::vector<Blocker>& blockers) const;

  /// Tx beam nearest the LoS departure direction.
  BeamId los_tx_beam() const;
  /// Rx beam nearest the LoS arrival direction.
  BeamId los_rx_beam() const;

 private:
  SiteGeometry geom_;
  SurfaceProfile surface_;
  LinkBudget budget_;
  Codebook tx_;
  Codebook rx_;
  std::vector<RayPath> paths_;
};

/// link_rss plus zero-mean Gaussian noise, floored at the noise floor.
/// With noise_sigma_db == 0 the generator is not touched.
LinkSample measure(const Channel& channel, BeamId tx, BeamId rx,
                   const std::vector<Blocker>& blockers, double noise_sigma_db, Rng& rng,
                   double time_ms = 0.0);

}  // namespace groundwave
