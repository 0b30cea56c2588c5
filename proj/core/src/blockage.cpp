#include "groundwave/blockage.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "groundwave/errors.hpp"

namespace groundwave {

void BlockageEvent::validate() const {
  if (!(duration_ms > 0.0)) {
    throw InvalidArgument("blockage duration must be positive");
  }
  blocker.validate();
}

void BlockageConfig::validate(double horizon_ms) const {
  if (!(rate_per_s >= 0.0) || !std::isfinite(rate_per_s)) {
    throw InvalidArgument("blockage rate must be a finite non-negative number");
  }
  if (!(min_duration_ms > 0.0 && min_duration_ms <= max_duration_ms &&
        max_duration_ms <= horizon_ms)) {
    throw InvalidArgument("blockage duration range must lie within (0, horizon]");
  }
  if (!(blocker_height_m > 0.0 && blocker_width_m > 0.0)) {
    throw InvalidArgument("blocker dimensions must be positive");
  }
}

std::vector<BlockageEvent> generate_events(double horizon_ms, const BlockageConfig& cfg,
                                           const SiteGeometry& geom, Rng& rng) {
  cfg.validate(horizon_ms);
  std::vector<BlockageEvent> events;
  if (cfg.rate_per_s == 0.0) {
    return events;
  }
  const double reach = blocker_reach(geom, cfg.blocker_height_m);
  if (!(reach > 0.0)) {
    throw InvalidArgument("blocker is too short to ever cut the direct ray");
  }
  std::exponential_distribution<double> gap(cfg.rate_per_s / 1000.0);
  std::uniform_real_distribution<double> duration(cfg.min_duration_ms, cfg.max_duration_ms);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = gap(rng);
  while (t < horizon_ms) {
    BlockageEvent ev;
    ev.start_ms = t;
    ev.duration_ms = duration(rng);
    ev.blocker.height_m = cfg.blocker_height_m;
    ev.blocker.width_m = cfg.blocker_width_m;
    // 1 - U lies in (0, 1], which keeps the pedestrian off the receiver itself.
    ev.blocker.distance_from_rx_m = reach * (1.0 - unit(rng));
    events.push_back(ev);
    t += gap(rng);
  }
  return events;
}

std::vector<Blocker> active_blockers(const std::vector<BlockageEvent>& events, double t_ms) {
  std::vector<Blocker> out;
  for (const auto& ev : events) {
    if (ev.active_at(t_ms)) {
      out.push_back(ev.blocker);
    }
  }
  return out;
}

std::string events_to_csv(const std::vector<BlockageEvent>& events) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "start_ms,duration_ms,height_m,distance_from_rx_m,azimuth_offset_m,width_m,opaque_base_m\n";
  for (const auto& ev : events) {
    os << ev.start_ms << ',' << ev.duration_ms << ',' << ev.blocker.height_m << ','
       << ev.blocker.distance_from_rx_m << ',' << ev.blocker.azimuth_offset_m << ','
       << ev.blocker.width_m << ',';
    if (ev.blocker.opaque_base_m) {
      os << *ev.blocker.opaque_base_m;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<BlockageEvent> events_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("start_ms,", 0) != 0) {
    throw FormatError("event trace: missing header");
  }
  std::vector<BlockageEvent> events;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (line.back() == ',') {
      cells.emplace_back();
    }
    if (cells.size() != 7) {
      throw FormatError("event trace line " + std::to_string(lineno) + ": expected 7 fields");
    }
    try {
      BlockageEvent ev;
      ev.start_ms = std::stod(cells[0]);
      ev.duration_ms = std::stod(cells[1]);
      ev.blocker.height_m = std::stod(cells[2]);
      ev.blocker.distance_from_rx_m = std::stod(cells[3]);
      ev.blocker.azimuth_offset_m = std::stod(cells[4]);
      ev.blocker.width_m = std::stod(cells[5]);
      if (!cells[6].empty()) {
        ev.blocker.opaque_base_m = std::stod(cells[6]);
      }
      ev.validate();
      events.push_back(ev);
    } catch (const std::logic_error&) {
      throw FormatError("event trace line " + std::to_string(lineno) + ": bad number");
    } catch (const InvalidArgument& e) {
      throw FormatError("event trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const BlockageEvent& a, const BlockageEvent& b) { return a.start_ms < b.start_ms; });
  return events;
}

}  // namespace groundwave
