#ifndef NTD_REPORT_HPP
#define NTD_REPORT_HPP

#include <string>

#include <json.hpp>

#include "ntd/experiment.hpp"

namespace ntd {

// Results document: {config, trials: [{sampler, seed, ok, metrics...}],
// aggregate: {sampler: {metric: {mean, std}}}} plus a flat comparison
// block when more than one sampler ran.
nlohmann::json results_to_json(const ExperimentResults& results);
ExperimentResults results_from_json(const nlohmann::json& doc);

void write_report(const ExperimentResults& results, const std::string& path);
ExperimentResults read_report(const std::string& path);

// One-line machine-readable summary for stdout.
std::string summary_line(const ExperimentResults& results);

// Aligned text table of aggregate metrics per sampler.
std::string comparison_table(const ExperimentResults& results);

// Copy with wall-time and resident-memory fields removed; two runs of
// the same config must agree on this form exactly.
nlohmann::json strip_volatile(nlohmann::json doc);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);

}  // namespace ntd

#endif  // NTD_REPORT_HPP
