#include "groundwave/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <json.hpp>

#include "groundwave/angles.hpp"
#include "groundwave/errors.hpp"

namespace groundwave {
namespace {

constexpr double kAngleTol = 1e-9;

bool same_angle(double a, double b) { return std::abs(a - b) <= kAngleTol; }

}  // namespace

void Beam::validate() const {
  if (!(az_beamwidth_deg > 0.0 && az_beamwidth_deg <= 360.0)) {
    throw InvalidArgument("azimuth beamwidth must lie in (0, 360]");
  }
  if (!(el_beamwidth_deg > 0.0 && el_beamwidth_deg <= 180.0)) {
    throw InvalidArgument("elevation beamwidth must lie in (0, 180]");
  }
  if (!(peak_gain_db >= 0.0)) {
    throw InvalidArgument("peak gain must be non-negative");
  }
}

Codebook::Codebook(std::vector<Beam> beams, double sector_start_deg, double sector_end_deg,
                   std::vector<double> elevation_rows_deg)
    : beams_(std::move(beams)),
      sector_start_(sector_start_deg),
      sector_end_(sector_end_deg),
      rows_(std::move(elevation_rows_deg)) {
  if (beams_.empty() || rows_.empty()) {
    throw InvalidArgument("codebook needs at least one beam and one elevation row");
  }
  if (!(sector_end_ > sector_start_)) {
    throw InvalidArgument("codebook sector must have positive extent");
  }
  if (beams_.size() % rows_.size() != 0) {
    throw InvalidArgument("every elevation row must hold the same number of beams");
  }
  const std::size_t cols = beams_.size() / rows_.size();
  std::set<std::pair<long long, long long>> seen;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Beam& b = beams_[r * cols + c];
      b.validate();
      if (b.azimuth_deg < sector_start_ - kAngleTol || b.azimuth_deg > sector_end_ + kAngleTol) {
        throw InvalidArgument("beam azimuth outside the codebook sector");
      }
      if (!same_angle(b.elevation_deg, rows_[r])) {
        throw InvalidArgument("beam elevation does not match its row");
      }
      if (r > 0 && !same_angle(b.azimuth_deg, beams_[c].azimuth_deg)) {
        throw InvalidArgument("azimuth columns differ between rows");
      }
      if (c >= 2) {
        const double step = beams_[r * cols + 1].azimuth_deg - beams_[r * cols].azimuth_deg;
        const double here = b.azimuth_deg - beams_[r * cols + c - 1].azimuth_deg;
        if (std::abs(here - step) > 1e-6) {
          throw InvalidArgument("azimuth spacing must be uniform");
        }
      }
      if (c >= 1 && !(b.azimuth_deg > beams_[r * cols + c - 1].azimuth_deg)) {
        throw InvalidArgument("azimuth columns must ascend");
      }
      const auto key = std::make_pair(std::llround(b.azimuth_deg * 1e6), std::llround(b.elevation_deg * 1e6));
      if (!seen.insert(key).second) {
        throw InvalidArgument("duplicate (azimuth, elevation) beam");
      }
    }
  }
}

const Beam& Codebook::at(BeamId id) const {
  if (!contains(id)) {
    throw InvalidArgument("beam index outside codebook");
  }
  return beams_[id.value];
}

std::size_t Codebook::row_of(BeamId id) const {
  at(id);
  return id.value / columns();
}

std::size_t Codebook::column_of(BeamId id) const {
  at(id);
  return id.value % columns();
}

BeamId Codebook::id_at(std::size_t row, std::size_t column) const {
  if (row >= rows_.size() || column >= columns()) {
    throw InvalidArgument("row/column outside codebook");
  }
  return BeamId{row * columns() + column};
}

BeamId Codebook::nearest(double azimuth_deg, double elevation_deg) const {
  std::size_t best = 0;
  double best_dist = INFINITY;
  for (std::size_t i = 0; i < beams_.size(); ++i) {
    const double daz = wrap_degrees(azimuth_deg - beams_[i].azimuth_deg);
    const double del = elevation_deg - beams_[i].elevation_deg;
    const double dist = daz * daz + del * del;
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return BeamId{best};
}

Codebook build_codebook(const CodebookSpec& spec) {
  if (spec.n_az < 1) {
    throw InvalidArgument("codebook needs at least one azimuth column");
  }
  if (!(spec.sector_deg > 0.0 && spec.sector_deg <= 360.0)) {
    throw InvalidArgument("sector must lie in (0, 360]");
  }
  if (spec.elevation_rows_deg.empty()) {
    throw InvalidArgument("codebook needs at least one elevation row");
  }
  const double spacing = spec.sector_deg / static_cast<double>(spec.n_az);
  const double start = -spec.sector_deg / 2.0;
  std::vector<double> rows;
  rows.reserve(spec.elevation_rows_deg.size());
  for (double r : spec.elevation_rows_deg) {
    rows.push_back(r + spec.elevation_offset_deg);
  }
  std::vector<Beam> beams;
  beams.reserve(spec.n_az * rows.size());
  for (double el : rows) {
    for (std::size_t i = 0; i < spec.n_az; ++i) {
      Beam b;
      b.azimuth_deg = start + spacing * (static_cast<double>(i) + 0.5);
      if (std::abs(b.azimuth_deg) < 1e-12) {
        b.azimuth_deg = 0.0;
      }
      b.elevation_deg = el;
      b.az_beamwidth_deg = spec.az_beamwidth_deg;
      b.el_beamwidth_deg = spec.el_beamwidth_deg;
      b.peak_gain_db = spec.peak_gain_db;
      beams.push_back(b);
    }
  }
  return Codebook(std::move(beams), start, -start, std::move(rows));
}

double gain(const Beam& beam, double toward_azimuth_deg, double toward_elevation_deg) {
  const double daz = wrap_degrees(toward_azimuth_deg - beam.azimuth_deg) / beam.az_beamwidth_deg;
  const double del = wrap_degrees(toward_elevation_deg - beam.elevation_deg) / beam.el_beamwidth_deg;
  const double lobe = beam.peak_gain_db - 12.0 * (daz * daz + del * del);
  return std::max(lobe, beam.peak_gain_db - kSideLobeFloorDb);
}

std::vector<BeamId> elevation_neighbors(const Codebook& cb, BeamId id, double window_deg) {
  const Beam& self = cb.at(id);
  const std::size_t col = cb.column_of(id);
  std::vector<BeamId> out;
  for (std::size_t r = 0; r < cb.elevation_rows().size(); ++r) {
    const BeamId other = cb.id_at(r, col);
    if (other == id) {
      continue;
    }
    if (std::abs(cb.at(other).elevation_deg - self.elevation_deg) <= window_deg + kAngleTol) {
      out.push_back(other);
    }
  }
  std::stable_sort(out.begin(), out.end(), [&](BeamId a, BeamId b) {
    const double da = cb.at(a).elevation_deg - self.elevation_deg;
    const double db = cb.at(b).elevation_deg - self.elevation_deg;
    if (!same_angle(std::abs(da), std::abs(db))) {
      return std::abs(da) < std::abs(db);
    }
    return da < db;
  });
  return out;
}

std::vector<BeamId> azimuth_neighbors(const Codebook& cb, BeamId id) {
  const std::size_t row = cb.row_of(id);
  const std::size_t col = cb.column_of(id);
  std::vector<BeamId> out;
  if (col > 0) {
    out.push_back(cb.id_at(row, col - 1));
  }
  if (col + 1 < cb.columns()) {
    out.push_back(cb.id_at(row, col + 1));
  }
  return out;
}

std::vector<BeamId> row_beams(const Codebook& cb, BeamId id) {
  const std::size_t row = cb.row_of(id);
  std::vector<BeamId> out;
  out.reserve(cb.columns());
  for (std::size_t c = 0; c < cb.columns(); ++c) {
    out.push_back(cb.id_at(row, c));
  }
  return out;
}

std::string codebook_to_json(const Codebook& cb) {
  nlohmann::ordered_json doc;
  doc["format"] = "groundwave-codebook/1";
  doc["sector_start_deg"] = cb.sector_start_deg();
  doc["sector_end_deg"] = cb.sector_end_deg();
  doc["elevation_rows_deg"] = cb.elevation_rows();
  nlohmann::ordered_json beams = nlohmann::ordered_json::array();
  for (const Beam& b : cb.beams()) {
    beams.push_back({{"azimuth_deg", b.azimuth_deg},
                     {"elevation_deg", b.elevation_deg},
                     {"az_beamwidth_deg", b.az_beamwidth_deg},
                     {"el_beamwidth_deg", b.el_beamwidth_deg},
                     {"peak_gain_db", b.peak_gain_db}});
  }
  doc["beams"] = std::move(beams);
  return doc.dump(2) + "\n";
}

Codebook codebook_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != "groundwave-codebook/1") {
      throw FormatError("unsupported codebook format tag");
    }
    std::vector<Beam> beams;
    for (const auto& jb : doc.at("beams")) {
      Beam b;
      b.azimuth_deg = jb.at("azimuth_deg").get<double>();
      b.elevation_deg = jb.at("elevation_deg").get<double>();
      b.az_beamwidth_deg = jb.at("az_beamwidth_deg").get<double>();
      b.el_beamwidth_deg = jb.at("el_beamwidth_deg").get<double>();
      b.peak_gain_db = jb.at("peak_gain_db").get<double>();
      beams.push_back(b);
    }
    return Codebook(std::move(beams), doc.at("sector_start_deg").get<double>(),
                    doc.at("sector_end_deg").get<double>(),
                    doc.at("elevation_rows_deg").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("codebook: ") + e.what());
  }
}

}  // namespace groundwave
