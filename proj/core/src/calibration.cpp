#include "groundwave/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace groundwave {
namespace {

struct GrReading {
  double rss_dbm;
  bool gr_blocked;
};

GrReading gr_reading(const LinkBudget& budget, const SurfaceProfile& surface,
                     const CalibrationSetup& setup, double tilt_deg, double d_br_m) {
  SiteGeometry geom = setup.geom;
  geom.tilt_tx_deg = tilt_deg;
  geom.validate();
  const RayPath gr = ground_reflection_path(geom);
  Blocker blocker;
  blocker.height_m = setup.blocker_height_m;
  blocker.distance_from_rx_m = d_br_m;
  const std::vector<Blocker> blockers{blocker};
  const bool gr_blocked = is_blocked(geom, gr, blocker);

  Beam tx_beam;
  Beam rx_beam;
  if (setup.alignment == BeamAlignment::Boresight) {
    tx_beam = Beam{gr.departure_azimuth_deg, gr.departure_elevation_deg,
                   setup.tx_spec.az_beamwidth_deg, setup.tx_spec.el_beamwidth_deg,
                   setup.tx_spec.peak_gain_db};
    rx_beam = Beam{gr.arrival_azimuth_deg, gr.arrival_elevation_deg,
                   setup.rx_spec.az_beamwidth_deg, setup.rx_spec.el_beamwidth_deg,
                   setup.rx_spec.peak_gain_db};
  } else {
    const Codebook tx = tilted_tx_codebook(setup.tx_spec, tilt_deg);
    const Codebook rx = facing_rx_codebook(setup.rx_spec, geom);
    const RayPath los = los_path(geom);
    tx_beam = tx.at(tx.nearest(los.departure_azimuth_deg, los.departure_elevation_deg));
    const BeamId rl = rx.nearest(los.arrival_azimuth_deg, los.arrival_elevation_deg);
    double best = -INFINITY;
    for (std::size_t r = 0; r < rx.elevation_rows().size(); ++r) {
      const Beam& cand = rx.at(rx.id_at(r, rx.column_of(rl)));
      const double p = path_power(budget, surface, tx_beam, cand, gr);
      if (p > best) {
        best = p;
        rx_beam = cand;
      }
    }
  }
  return {rss(budget, geom, surface, tx_beam, rx_beam, gr, blockers), gr_blocked};
}

// Minimizer of sum |d_i - r| closest to the minimax point, clamped at 0.
double robust_offset(std::vector<double> devs) {
  std::sort(devs.begin(), devs.end());
  const std::size_t n = devs.size();
  const double lo = devs[(n - 1) / 2];
  const double hi = devs[n / 2];
  const double mid = 0.5 * (devs.front() + devs.back());
  return std::max(0.0, std::clamp(mid, lo, hi));
}

}  // namespace

CalibrationTargets reference_targets() {
  CalibrationTargets t;
  t.rss_los_dbm = -60.0;
  const struct {
    Surface s;
    double rows[3][2];
  } table[] = {
      {Surface::IndoorConcreteTile, {{-65.7, -66.0}, {-64.5, -64.45}, {-64.4, -64.3}}},
      {Surface::OutdoorConcrete, {{-66.0, -66.0}, {-64.7, -64.5}, {-64.1, -64.0}}},
      {Surface::OutdoorGravel, {{-66.1, -65.9}, {-64.8, -64.4}, {-64.4, -64.3}}},
  };
  const double tilts[3] = {0.0, 10.0, 20.0};
  const double dbr[2] = {2.0, 3.0};
  for (const auto& surf : table) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 2; ++j) {
        t.gr.push_back(GrTarget{surf.s, tilts[i], dbr[j], surf.rows[i][j]});
      }
    }
  }
  return t;
}

Codebook tilted_tx_codebook(const CodebookSpec& spec, double tilt_deg) {
  CodebookSpec s = spec;
  s.elevation_offset_deg = spec.elevation_offset_deg - tilt_deg;
  return build_codebook(s);
}

Codebook facing_rx_codebook(const CodebookSpec& spec, const SiteGeometry& geom) {
  CodebookSpec s = spec;
  s.elevation_offset_deg = spec.elevation_offset_deg + los_path(geom).arrival_elevation_deg;
  return build_codebook(s);
}

double Calibration::max_abs_residual_db() const {
  double m = 0.0;
  for (const auto& r : rows) {
    m = std::max(m, std::abs(r.residual_db));
  }
  return m;
}

SurfaceProfile Calibration::profile(Surface s) const {
  const auto it = reflection_loss_db.find(s);
  if (it == reflection_loss_db.end()) {
    throw ScenarioFault(std::string("no calibration for surface ") + to_string(s) +
                        "; run `groundwave calibrate` first");
  }
  return SurfaceProfile{s, it->second};
}

LinkBudget Calibration::apply(LinkBudget budget) const {
  budget.system_loss_db = system_loss_db;
  return budget;
}

double predict_gr(const LinkBudget& calibrated_budget, const SurfaceProfile& surface,
                  const CalibrationSetup& setup, double tilt_deg, double d_br_m) {
  return gr_reading(calibrated_budget, surface, setup, tilt_deg, d_br_m).rss_dbm;
}

Calibration calibrate(const LinkBudget& budget, const CalibrationSetup& setup,
                      const CalibrationTargets& targets) {
  budget.validate();
  if (targets.gr.empty()) {
    throw InvalidArgument("calibration needs at least one ground-reflection target");
  }
  Calibration cal;
  cal.rss_los_dbm = targets.rss_los_dbm;
  cal.system_loss_db = budget.tx_power_dbm + setup.tx_spec.peak_gain_db +
                       setup.rx_spec.peak_gain_db -
                       fspl(los_path(setup.geom).length_m, budget.carrier_ghz) -
                       targets.rss_los_dbm;
  const LinkBudget fitted = cal.apply(budget);

  std::map<Surface, std::vector<std::size_t>> by_surface;
  for (std::size_t i = 0; i < targets.gr.size(); ++i) {
    by_surface[targets.gr[i].surface].push_back(i);
  }
  std::vector<double> lossless(targets.gr.size());
  std::vector<bool> unreachable(targets.gr.size(), false);
  for (const auto& [surface, idx] : by_surface) {
    std::vector<double> devs;
    for (std::size_t i : idx) {
      const GrTarget& t = targets.gr[i];
      const GrReading r = gr_reading(fitted, SurfaceProfile{surface, 0.0}, setup, t.tilt_deg, t.d_br_m);
      lossless[i] = r.rss_dbm;
      unreachable[i] = r.gr_blocked;
      devs.push_back(r.rss_dbm - t.rss_dbm);
    }
    cal.reflection_loss_db[surface] = robust_offset(devs);
  }
  for (std::size_t i = 0; i < targets.gr.size(); ++i) {
    const GrTarget& t = targets.gr[i];
    const double loss = cal.reflection_loss_db[t.surface];
    CalibrationRow row;
    row.target = t;
    row.predicted_dbm =
        unreachable[i] ? fitted.noise_floor_dbm
                       : std::max(fitted.noise_floor_dbm, lossless[i] - loss);
    row.residual_db = row.predicted_dbm - t.rss_dbm;
    cal.rows.push_back(row);
  }
  if (cal.max_abs_residual_db() > setup.max_residual_db) {
    std::ostringstream msg;
    msg << "calibration residual " << cal.max_abs_residual_db() << " dB exceeds the "
        << setup.max_residual_db << " dB gate";
    throw CalibrationError(msg.str(), cal);
  }
  return cal;
}

std::string calibration_to_json(const Calibration& cal) {
  nlohmann::ordered_json doc;
  doc["format"] = "groundwave-calibration/1";
  doc["rss_los_dbm"] = cal.rss_los_dbm;
  doc["system_loss_db"] = cal.system_loss_db;
  nlohmann::ordered_json losses = nlohmann::ordered_json::object();
  for (const auto& [s, v] : cal.reflection_loss_db) {
    losses[to_string(s)] = v;
  }
  doc["reflection_loss_db"] = std::move(losses);
  doc["max_abs_residual_db"] = cal.max_abs_residual_db();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : cal.rows) {
    rows.push_back({{"surface", to_string(r.target.surface)},
                    {"tilt_deg", r.target.tilt_deg},
                    {"d_br_m", r.target.d_br_m},
                    {"measured_dbm", r.target.rss_dbm},
                    {"predicted_dbm", r.predicted_dbm},
                    {"residual_db", r.residual_db}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

Calibration calibration_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != "groundwave-calibration/1") {
      throw FormatError("unsupported calibration format tag");
    }
    Calibration cal;
    cal.rss_los_dbm = doc.at("rss_los_dbm").get<double>();
    cal.system_loss_db = doc.at("system_loss_db").get<double>();
    for (const auto& [k, v] : doc.at("reflection_loss_db").items()) {
      cal.reflection_loss_db[surface_from_string(k)] = v.get<double>();
    }
    for (const auto& jr : doc.at("rows")) {
      CalibrationRow r;
      r.target.surface = surface_from_string(jr.at("surface").get<std::string>());
      r.target.tilt_deg = jr.at("tilt_deg").get<double>();
      r.target.d_br_m = jr.at("d_br_m").get<double>();
      r.target.rss_dbm = jr.at("measured_dbm").get<double>();
      r.predicted_dbm = jr.at("predicted_dbm").get<double>();
      r.residual_db = jr.at("residual_db").get<double>();
      cal.rows.push_back(r);
    }
    return cal;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("calibration: ") + e.what());
  }
}

}  // namespace groundwave
