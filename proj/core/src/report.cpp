#include "groundwave/report.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace groundwave {
namespace {

std::ostringstream fixed_stream(int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits);
  return os;
}

double axis_value(const ScenarioConfig& cfg, const std::string& name) {
  if (name == "tilt_deg") return cfg.geom.tilt_tx_deg;
  if (name == "d_tr_m") return cfg.geom.d_tr_m;
  if (name == "h_tx_m") return cfg.geom.h_tx_m;
  if (name == "h_rx_m") return cfg.geom.h_rx_m;
  if (name == "rate_per_s") return cfg.blockage.rate_per_s;
  if (name == "noise_sigma_db") return cfg.noise_sigma_db;
  if (name == "probe_interval_ms") return cfg.probe_interval_ms;
  if (name == "horizon_ms") return cfg.horizon_ms;
  return 0.0;
}

}  // namespace

std::string metrics_csv_header() {
  return "policy,seed,horizon_ms,total_outage_ms,n_blockage_events,n_events_survived,"
         "n_interruptions,measurements_total,discovery_episodes,discovery_measurements,"
         "reacquisitions,reacquisition_measurements,alignment_measurements,los_probes,"
         "mean_rss_during_blockage_dbm,mean_recovery_latency_ms,max_recovery_latency_ms,"
         "grd_impossible\n";
}

std::string metrics_csv_row(const RunMetrics& m) {
  const auto& lat = m.recovery_latency_ms;
  const double mean_lat =
      lat.empty() ? 0.0 : std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(lat.size());
  const double max_lat = lat.empty() ? 0.0 : *std::max_element(lat.begin(), lat.end());
  auto os = fixed_stream();
  os << to_string(m.policy) << ',' << m.seed << ',' << m.horizon_ms << ',' << m.total_outage_ms
     << ',' << m.n_blockage_events << ',' << m.n_events_survived << ',' << m.n_interruptions << ','
     << m.measurements_total() << ',' << m.discovery_episodes << ',' << m.discovery_measurements
     << ',' << m.reacquisitions << ',' << m.reacquisition_measurements << ','
     << m.alignment_measurements << ',' << m.los_probes << ',' << m.mean_rss_during_blockage_dbm
     << ',' << mean_lat << ',' << max_lat << ',' << (m.grd_impossible ? 1 : 0) << '\n';
  return os.str();
}

std::string metrics_to_csv(const std::vector<RunMetrics>& runs) {
  std::string out = metrics_csv_header();
  for (const auto& m : runs) {
    out += metrics_csv_row(m);
  }
  return out;
}

std::string trace_to_csv(const RunMetrics& m) {
  auto os = fixed_stream();
  os << "time_ms,rss_dbm,mode\n";
  for (const auto& p : m.rss_trace) {
    os << p.time_ms << ',' << p.rss_dbm << ',' << p.mode << '\n';
  }
  return os.str();
}

std::string event_outcomes_to_csv(const RunMetrics& m) {
  auto os = fixed_stream();
  os << "policy,event_start_ms,duration_ms,distance_from_rx_m,survived,outage_ms\n";
  for (const auto& e : m.events) {
    os << to_string(m.policy) << ',' << e.start_ms << ',' << e.duration_ms << ','
       << e.distance_from_rx_m << ',' << (e.survived ? 1 : 0) << ',' << e.outage_ms << '\n';
  }
  return os.str();
}

PolicyReport make_report(const RunMetrics& m) {
  PolicyReport r;
  r.policy = m.policy;
  r.measurements_used = m.measurements_per_episode();
  r.outage_ms = m.total_outage_ms;
  r.recovered_rss_dbm = m.mean_rss_during_blockage_dbm;
  if (m.policy == PolicyKind::GroundReflection && m.grd_impossible) {
    r.note = "GRD impossible";
  }
  return r;
}

std::string comparison_to_csv(const std::vector<PolicyReport>& rows) {
  auto os = fixed_stream();
  os << "policy,measurements,outage_ms,mean_rss_during_blockage_dbm,note\n";
  for (const auto& r : rows) {
    os << to_string(r.policy) << ',' << std::setprecision(2) << r.measurements_used << ','
       << std::setprecision(3) << r.outage_ms << ',' << r.recovered_rss_dbm << ',' << r.note << '\n';
  }
  return os.str();
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points, const std::vector<SweepAxis>& grid) {
  std::string header = "index";
  for (const auto& axis : grid) {
    header += ',' + axis.parameter;
  }
  header += ',' + metrics_csv_header();
  std::string out = header;
  for (const auto& p : points) {
    auto os = fixed_stream();
    os << p.index;
    for (const auto& axis : grid) {
      os << ',' << axis_value(p.config, axis.parameter);
    }
    os << ',' << metrics_csv_row(p.metrics);
    out += os.str();
  }
  return out;
}

}  // namespace groundwave
