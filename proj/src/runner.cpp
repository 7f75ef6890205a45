#include "cfmimo/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cfmimo/channel.hpp"
#include "cfmimo/fronthaul.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start)
      .count();
}

std::vector<SchemeSetupStats> run_one_setup(const ScenarioConfig& cfg,
                                            int setup_index,
                                            bool zero_timings,
                                            TrialDump* dump) {
  const std::uint64_t setup_seed =
      derive_key(cfg.rng_seed, Sub::Setup,
                 {static_cast<std::uint64_t>(setup_index)});

  const Topology topo = generate_topology(cfg, setup_seed);
  const LsfState lsf = compute_lsf_state(cfg, topo, setup_seed);
  const PilotAssignment pilots = assign_pilots(lsf.beta_lin, cfg.tau_p);

  std::vector<Association> assocs;
  std::vector<double> assoc_time_us;
  assocs.reserve(cfg.schemes.size());
  for (Scheme scheme : cfg.schemes) {
    const auto start = Clock::now();
    assocs.push_back(associate_all(scheme, lsf.beta_lin, pilots, topo, cfg));
    assoc_time_us.push_back(zero_timings ? 0.0
                                         : elapsed_us(start) / cfg.num_ues);
  }

  const std::vector<PhySchemeResult> phy =
      evaluate_dl_phy(cfg, lsf, pilots, assocs, setup_seed, dump);

  std::vector<SchemeSetupStats> stats;
  stats.reserve(cfg.schemes.size());
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    const FronthaulReport fh =
        fronthaul_report(assocs[s], topo, cfg.antennas_per_ap, cfg.tau_c);
    SchemeSetupStats st = aggregate(assocs[s], fh, phy[s].se,
                                    assoc_time_us[s], cfg.num_aps,
                                    cfg.num_cpus);
    st.precoder_fallbacks = phy[s].precoder_fallbacks;
    stats.push_back(std::move(st));
  }
  return stats;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config,
                       const RunnerOptions& options) {
  config.validate();
  const auto wall_start = Clock::now();
  const int setups = config.num_setups;
  const int threads =
      options.deterministic ? 1 : std::max(1, std::min(options.threads, setups));

  // results[setup][scheme]
  std::vector<std::vector<SchemeSetupStats>> results(setups);
  if (threads == 1) {
    for (int s = 0; s < setups; ++s) {
      results[s] = run_one_setup(config, s, options.deterministic,
                                 s == 0 ? options.dump : nullptr);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int s = next.fetch_add(1); s < setups; s = next.fetch_add(1)) {
        results[s] = run_one_setup(config, s, options.deterministic,
                                   s == 0 ? options.dump : nullptr);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunReport report;
  report.config = config;
  report.deterministic = options.deterministic;
  for (std::size_t sch = 0; sch < config.schemes.size(); ++sch) {
    std::vector<SchemeSetupStats> per_setup;
    per_setup.reserve(setups);
    for (int s = 0; s < setups; ++s) per_setup.push_back(results[s][sch]);
    report.schemes.push_back(reduce_setups(config.schemes[sch], per_setup));
  }
  report.wall_seconds =
      options.deterministic ? 0.0 : elapsed_us(wall_start) / 1e6;
  return report;
}

ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis,
                          double value) {
  ScenarioConfig cfg = base;
  if (axis == "K") {
    cfg.num_ues = static_cast<int>(std::llround(value));
  } else if (axis == "U") {
    cfg.num_cpus = static_cast<int>(std::llround(value));
  } else if (axis == "area_km2") {
    cfg.area_side_m = std::sqrt(value * 1e6);
  } else {
    throw std::invalid_argument("unknown sweep axis: " + axis +
                                " (expected K, U, or area_km2)");
  }
  cfg.validate();
  return cfg;
}

std::vector<RunReport> run_sweep(const SweepSpec& spec,
                                 const RunnerOptions& options) {
  if (spec.values.empty()) {
    throw std::invalid_argument("sweep: empty value list");
  }
  for (double v : spec.values) apply_axis(spec.base, spec.axis, v);  // validate all

  std::vector<RunReport> reports;
  reports.reserve(spec.values.size());
  for (double v : spec.values) {
    reports.push_back(run_scenario(apply_axis(spec.base, spec.axis, v),
                                   options));
  }
  return reports;
}

}  // namespace cfmimo
