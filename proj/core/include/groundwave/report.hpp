#pragma once

// CSV renderings of run results. Column orders are part of the public
// contract and documented in the README.

#include <string>
#include <vector>

#include "groundwave/simcore.hpp"

namespace groundwave {

std::string metrics_csv_header();
std::string metrics_csv_row(const RunMetrics& m);
std::string metrics_to_csv(const std::vector<RunMetrics>& runs);

/// time_ms,rss_dbm,mode
std::string trace_to_csv(const RunMetrics& m);

/// policy,event_start_ms,duration_ms,distance_from_rx_m,survived,outage_ms
std::string event_outcomes_to_csv(const RunMetrics& m);

PolicyReport make_report(const RunMetrics& m);

/// policy,measurements,outage_ms,mean_rss_during_blockage_dbm,note
std::string comparison_to_csv(const std::vector<PolicyReport>& rows);

/// index,<swept parameters...>,<metrics columns>
std::string sweep_to_csv(const std::vector<SweepPoint>& points, const std::vector<SweepAxis>& grid);

}  // namespace groundwave
