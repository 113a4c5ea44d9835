#include "eotbench/report_io.hpp"

#include "eotbench/pair_io.hpp"

namespace eotbench {

std::string report_to_text(const MetricReport& report) {
  std::string out = "metric: " + report.metric + "\n";
  out += "value: " + format_real(report.value) + "\n";
  out += "normalization: " + format_real(report.normalization) + "\n";
  if (report.seed) out += "seed: " + std::to_string(*report.seed) + "\n";
  for (const auto& [k, v] : report.settings) out += k + ": " + v + "\n";
  return out;
}

std::string reports_to_csv(const std::vector<MetricReport>& reports) {
  std::string out = "metric,value,normalization,seed,settings\n";
  for (const auto& r : reports) {
    std::string settings;
    for (const auto& [k, v] : r.settings) {
      if (!settings.empty()) settings += ';';
      settings += k + "=" + v;
    }
    std::string quoted = "\"";
    for (char c : settings) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    quoted += '"';
    out += r.metric + "," + format_real(r.value) + "," + format_real(r.normalization) + "," +
           (r.seed ? std::to_string(*r.seed) : std::string()) + "," + quoted + "\n";
  }
  return out;
}

}  // namespace eotbench
