#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/metrics.hpp"
#include "cfmimo/phy.hpp"

namespace cfmimo {

struct RunnerOptions {
  int threads = 1;
  // Single-threaded, byte-stable output: volatile wall-clock fields are
  // zeroed so identical seeds produce identical report files.
  bool deterministic = false;
  TrialDump* dump = nullptr;  // per-trial signal dump for the first setup
};

// Full pipeline: topology -> LSF -> pilots -> association (per scheme) ->
// fronthaul -> estimation/precoding/power -> SINR/SE -> metrics, averaged
// over config.num_setups.
RunReport run_scenario(const ScenarioConfig& config,
                       const RunnerOptions& options = {});

struct SweepSpec {
  ScenarioConfig base;
  std::string axis;  // "K" | "U" | "area_km2"
  std::vector<double> values;
  std::string out_dir;
};

// One scenario per axis value; reports returned in value order.
std::vector<RunReport> run_sweep(const SweepSpec& spec,
                                 const RunnerOptions& options = {});

// The swept config for one axis value (shared with `validate`).
ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis,
                          double value);

}  // namespace cfmimo
