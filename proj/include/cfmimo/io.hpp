#pragma once

#include <string>
#include <vector>

#include "cfmimo/association.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/metrics.hpp"
#include "cfmimo/runner.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

// Config files are flat JSON objects; unknown keys are rejected.
ScenarioConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ScenarioConfig& config);
ScenarioConfig load_config(const std::string& path);

// --set key=value override on a single config field.
void apply_override(ScenarioConfig& config, const std::string& key_value);

SweepSpec load_sweep(const std::string& path);

std::string topology_to_json_text(const Topology& topo);
std::string association_to_json_text(const Association& assoc);

std::string report_to_json_text(const RunReport& report);

// report.json, summary.csv, se_cdf.csv under dir (created if needed).
void write_report_files(const RunReport& report, const std::string& dir);

// Combined sweep summary: one row per (axis value, scheme) with SE, load
// and fairness columns.
void write_sweep_summary(const std::vector<RunReport>& reports,
                         const std::string& axis,
                         const std::vector<double>& values,
                         const std::string& dir);

// One (ue, ap, beta_db) row per pair, for cross-implementation comparison.
void write_lsf_csv(const LsfState& lsf, const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace cfmimo
