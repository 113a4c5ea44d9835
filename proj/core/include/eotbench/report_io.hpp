#pragma once

#include "eotbench/metrics.hpp"

#include <string>
#include <vector>

namespace eotbench {

/// "key: value" lines: metric, value, normalization, seed, then the settings
/// in insertion order.
std::string report_to_text(const MetricReport& report);

/// One CSV table: metric,value,normalization,seed,settings where settings is
/// a ';'-joined key=value list (quoted). Suited to concatenating runs.
std::string reports_to_csv(const std::vector<MetricReport>& reports);

}  // namespace eotbench
