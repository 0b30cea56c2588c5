#include "groundwave_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "groundwave/errors.hpp"

namespace groundwave::cli {
namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

// Reads keys from one JSON object and remembers which ones were consumed so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& parent, const std::string& name, std::string path)
      : path_(std::move(path)) {
    if (!parent.contains(name)) {
      return;
    }
    node_ = &parent.at(name);
    if (!node_->is_object()) {
      throw FormatError(path_ + " must be an object");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) {
      return;
    }
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw FormatError(path_ + "." + key + " has the wrong type");
    }
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) {
      return nullptr;
    }
    return &node_->at(key);
  }

  void finish() const {
    if (node_ == nullptr) {
      return;
    }
    for (const auto& [k, v] : node_->items()) {
      if (!seen_.count(k)) {
        throw FormatError("unknown config key " + path_ + "." + k);
      }
    }
  }

 private:
  std::string path_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

void read_codebook(const json& root, const char* name, CodebookSpec& spec) {
  Section s(root, name, name);
  s.get("n_az", spec.n_az);
  s.get("sector_deg", spec.sector_deg);
  s.get("az_beamwidth_deg", spec.az_beamwidth_deg);
  s.get("el_beamwidth_deg", spec.el_beamwidth_deg);
  s.get("peak_gain_db", spec.peak_gain_db);
  s.get("elevation_rows_deg", spec.elevation_rows_deg);
  s.get("elevation_offset_deg", spec.elevation_offset_deg);
  s.finish();
}

ordered write_codebook(const CodebookSpec& spec) {
  return {{"n_az", spec.n_az},
          {"sector_deg", spec.sector_deg},
          {"az_beamwidth_deg", spec.az_beamwidth_deg},
          {"el_beamwidth_deg", spec.el_beamwidth_deg},
          {"peak_gain_db", spec.peak_gain_db},
          {"elevation_rows_deg", spec.elevation_rows_deg},
          {"elevation_offset_deg", spec.elevation_offset_deg}};
}

Surface read_surface(const json& v, const std::string& where) {
  if (!v.is_string()) {
    throw FormatError(where + " must be a surface name");
  }
  return surface_from_string(v.get<std::string>());
}

}  // namespace

CalibrationSetup Config::calibration_setup() const {
  CalibrationSetup setup;
  setup.geom = scenario.geom;
  setup.tx_spec = scenario.tx_codebook;
  setup.rx_spec = scenario.rx_codebook;
  setup.blocker_height_m = scenario.blockage.blocker_height_m;
  setup.max_residual_db = max_residual_db;
  return setup;
}

Config parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw FormatError("config must be a JSON object");
  }
  Config cfg;
  ScenarioConfig& sc = cfg.scenario;
  static const std::set<std::string> kSections = {"site",    "link",     "tx_codebook", "rx_codebook",
                                                  "nlos",    "blockage", "access",      "protocol",
                                                  "simulation", "calibration"};
  for (const auto& [k, v] : root.items()) {
    if (!kSections.count(k)) {
      throw FormatError("unknown config section '" + k + "'");
    }
  }

  {
    Section s(root, "site", "site");
    s.get("h_tx_m", sc.geom.h_tx_m);
    s.get("h_rx_m", sc.geom.h_rx_m);
    s.get("d_tr_m", sc.geom.d_tr_m);
    s.get("tilt_deg", sc.geom.tilt_tx_deg);
    if (const json* v = s.raw("surface")) {
      sc.surface = read_surface(*v, "site.surface");
    }
    s.finish();
  }
  {
    Section s(root, "link", "link");
    s.get("tx_power_dbm", sc.budget.tx_power_dbm);
    s.get("noise_floor_dbm", sc.budget.noise_floor_dbm);
    s.get("carrier_ghz", sc.budget.carrier_ghz);
    s.get("noise_sigma_db", sc.noise_sigma_db);
    s.finish();
  }
  read_codebook(root, "tx_codebook", sc.tx_codebook);
  read_codebook(root, "rx_codebook", sc.rx_codebook);
  {
    Section s(root, "nlos", "nlos");
    s.get("enabled", sc.nlos.enabled);
    s.get("arrival_azimuth_deg", sc.nlos.arrival_azimuth_deg);
    s.get("excess_loss_db", sc.nlos.excess_loss_db);
    s.finish();
  }
  {
    Section s(root, "blockage", "blockage");
    s.get("rate_per_s", sc.blockage.rate_per_s);
    s.get("min_duration_ms", sc.blockage.min_duration_ms);
    s.get("max_duration_ms", sc.blockage.max_duration_ms);
    s.get("blocker_height_m", sc.blockage.blocker_height_m);
    s.get("blocker_width_m", sc.blockage.blocker_width_m);
    s.finish();
  }
  {
    Section s(root, "access", "access");
    s.get("n_sweep_beams", sc.access.n_sweep_beams);
    s.get("sweep_period_ms", sc.access.sweep_period_ms);
    s.get("attach_overhead_ms", sc.access.attach_overhead_ms);
    s.finish();
  }
  {
    Section s(root, "protocol", "protocol");
    s.get("detection_margin_db", sc.protocol.detection_margin_db);
    s.get("hysteresis_db", sc.protocol.hysteresis_db);
    s.get("rbo_period_ms", sc.protocol.rbo_period_ms);
    s.get("ba_window_samples", sc.ba_window);
    s.get("ba_drop_db", sc.ba_drop_db);
    s.finish();
  }
  {
    Section s(root, "simulation", "simulation");
    if (const json* v = s.raw("policy")) {
      if (!v->is_string()) {
        throw FormatError("simulation.policy must be a string");
      }
      try {
        sc.policy = policy_from_string(v->get<std::string>());
      } catch (const InvalidArgument& e) {
        throw FormatError(e.what());
      }
    }
    s.get("horizon_ms", sc.horizon_ms);
    s.get("probe_interval_ms", sc.probe_interval_ms);
    s.get("seed", sc.seed);
    s.finish();
  }
  {
    Section s(root, "calibration", "calibration");
    s.get("rss_los_dbm", cfg.targets.rss_los_dbm);
    s.get("max_residual_db", cfg.max_residual_db);
    if (const json* rows = s.raw("gr_targets")) {
      if (!rows->is_array()) {
        throw FormatError("calibration.gr_targets must be an array");
      }
      cfg.targets.gr.clear();
      for (std::size_t i = 0; i < rows->size(); ++i) {
        const std::string where = "calibration.gr_targets[" + std::to_string(i) + "]";
        const json& row = rows->at(i);
        if (!row.is_object()) {
          throw FormatError(where + " must be an object");
        }
        json wrapper = {{"row", row}};
        Section rs(wrapper, "row", where);
        GrTarget t;
        if (const json* v = rs.raw("surface")) {
          t.surface = read_surface(*v, where + ".surface");
        }
        rs.get("tilt_deg", t.tilt_deg);
        rs.get("d_br_m", t.d_br_m);
        rs.get("rss_dbm", t.rss_dbm);
        rs.finish();
        cfg.targets.gr.push_back(t);
      }
    }
    s.finish();
  }
  return cfg;
}

std::string serialize_config(const Config& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  ordered root;
  root["site"] = {{"h_tx_m", sc.geom.h_tx_m},
                  {"h_rx_m", sc.geom.h_rx_m},
                  {"d_tr_m", sc.geom.d_tr_m},
                  {"tilt_deg", sc.geom.tilt_tx_deg},
                  {"surface", to_string(sc.surface)}};
  root["link"] = {{"tx_power_dbm", sc.budget.tx_power_dbm},
                  {"noise_floor_dbm", sc.budget.noise_floor_dbm},
                  {"carrier_ghz", sc.budget.carrier_ghz},
                  {"noise_sigma_db", sc.noise_sigma_db}};
  root["tx_codebook"] = write_codebook(sc.tx_codebook);
  root["rx_codebook"] = write_codebook(sc.rx_codebook);
  root["nlos"] = {{"enabled", sc.nlos.enabled},
                  {"arrival_azimuth_deg", sc.nlos.arrival_azimuth_deg},
                  {"excess_loss_db", sc.nlos.excess_loss_db}};
  root["blockage"] = {{"rate_per_s", sc.blockage.rate_per_s},
                      {"min_duration_ms", sc.blockage.min_duration_ms},
                      {"max_duration_ms", sc.blockage.max_duration_ms},
                      {"blocker_height_m", sc.blockage.blocker_height_m},
                      {"blocker_width_m", sc.blockage.blocker_width_m}};
  root["access"] = {{"n_sweep_beams", sc.access.n_sweep_beams},
                    {"sweep_period_ms", sc.access.sweep_period_ms},
                    {"attach_overhead_ms", sc.access.attach_overhead_ms}};
  root["protocol"] = {{"detection_margin_db", sc.protocol.detection_margin_db},
                      {"hysteresis_db", sc.protocol.hysteresis_db},
                      {"rbo_period_ms", sc.protocol.rbo_period_ms},
                      {"ba_window_samples", sc.ba_window},
                      {"ba_drop_db", sc.ba_drop_db}};
  root["simulation"] = {{"policy", to_string(sc.policy)},
                        {"horizon_ms", sc.horizon_ms},
                        {"probe_interval_ms", sc.probe_interval_ms},
                        {"seed", sc.seed}};
  ordered rows = ordered::array();
  for (const auto& t : cfg.targets.gr) {
    rows.push_back({{"surface", to_string(t.surface)},
                    {"tilt_deg", t.tilt_deg},
                    {"d_br_m", t.d_br_m},
                    {"rss_dbm", t.rss_dbm}});
  }
  root["calibration"] = {{"rss_los_dbm", cfg.targets.rss_los_dbm},
                         {"max_residual_db", cfg.max_residual_db},
                         {"gr_targets", std::move(rows)}};
  return root.dump(2) + "\n";
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot read config " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace groundwave::cli
