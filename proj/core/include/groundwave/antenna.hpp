#pragma once

// Parametric phased-array beams and steering codebooks.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace groundwave {

/// Below the main lobe every direction sees at least peak - kSideLobeFloorDb.
inline constexpr double kSideLobeFloorDb = 20.0;

struct Beam {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;  // negative = below horizontal
  double az_beamwidth_deg = 18.0;
  double el_beamwidth_deg = 60.0;
  double peak_gain_db = 17.0;

  void validate() const;

  bool operator==(const Beam&) const = default;
};

/// Index of a beam inside its codebook.
struct BeamId {
  std::size_t value = 0;

  auto operator<=>(const BeamId&) const = default;
};

/// Everything needed to synthesize a codebook. Rows are given relative to
/// the array boresight; `elevation_offset_deg` rotates the whole array
/// (negative tilts it towards the ground).
struct CodebookSpec {
  std::size_t n_az = 25;
  double sector_deg = 120.0;
  double az_beamwidth_deg = 18.0;
  double el_beamwidth_deg = 60.0;
  double peak_gain_db = 17.0;
  std::vector<double> elevation_rows_deg{0.0};
  double elevation_offset_deg = 0.0;

  bool operator==(const CodebookSpec&) const = default;
};

/// An immutable set of steerable beams laid out as elevation rows x uniform
/// azimuth columns. Beam index = row * n_az + column, columns ascending in
/// azimuth.
class Codebook {
 public:
  Codebook() = default;

  /// Validates coverage, uniform spacing and uniqueness; throws InvalidArgument.
  Codebook(std::vector<Beam> beams, double sector_start_deg, double sector_end_deg,
           std::vector<double> elevation_rows_deg);

  std::size_t size() const { return beams_.size(); }
  bool empty() const { return beams_.empty(); }
  bool contains(BeamId id) const { return id.value < beams_.size(); }
  const Beam& at(BeamId id) const;
  const std::vector<Beam>& beams() const { return beams_; }
  const std::vector<double>& elevation_rows() const { return rows_; }
  double sector_start_deg() const { return sector_start_; }
  double sector_end_deg() const { return sector_end_; }
  std::size_t columns() const { return rows_.empty() ? 0 : beams_.size() / rows_.size(); }

  std::size_t row_of(BeamId id) const;
  std::size_t column_of(BeamId id) const;
  BeamId id_at(std::size_t row, std::size_t column) const;

  /// Beam whose boresight is nearest (az, el); ties go to the lower index.
  BeamId nearest(double azimuth_deg, double elevation_deg) const;

  bool operator==(const Codebook&) const = default;

 private:
  std::vector<Beam> beams_;
  double sector_start_ = 0.0;
  double sector_end_ = 0.0;
  std::vector<double> rows_;
};

/// Uniform codebook: n_az boresights spaced sector/n_az apart, centered on
/// azimuth 0, repeated for every elevation row.
Codebook build_codebook(const CodebookSpec& spec);

/// Gaussian main lobe, exact -3 dB at half the beamwidth, floored
/// kSideLobeFloorDb below peak.
double gain(const Beam& beam, double toward_azimuth_deg, double toward_elevation_deg);

/// Beams in the same azimuth column within `window_deg` of elevation,
/// nearest first, downward neighbor first on ties. Excludes `id` itself.
std::vector<BeamId> elevation_neighbors(const Codebook& cb, BeamId id, double window_deg);

/// Left then right azimuth neighbor in the same elevation row, when present.
std::vector<BeamId> azimuth_neighbors(const Codebook& cb, BeamId id);

/// Every beam in the elevation row of `id`, in column order.
std::vector<BeamId> row_beams(const Codebook& cb, BeamId id);

/// Structured-text (JSON) dump of a codebook; see README for the schema.
std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const std::string& text);

}  // namespace groundwave
