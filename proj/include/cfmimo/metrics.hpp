#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cfmimo/association.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/fronthaul.hpp"
#include "cfmimo/phy.hpp"

namespace cfmimo {

// Jain's fairness index (sum x)^2 / (K sum x^2) in [1/K, 1].
// An all-zero vector is treated as perfectly uniform (returns 1).
double jain_fairness(const Eigen::VectorXd& values);

// Empirical q-quantile with linear interpolation; q=0 -> min, q=1 -> max.
double outage_quantile(Eigen::VectorXd values, double q);

struct CountStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

CountStats count_stats(const std::vector<int>& counts);

// Everything measured for one (scheme, setup) pair.
struct SchemeSetupStats {
  Eigen::VectorXd se;  // per UE
  double se_mean = 0.0;
  double jain = 0.0;
  double outage5 = 0.0;
  long long load_scalars = 0;
  CountStats aps_per_ue, ues_per_ap, ues_per_cpu_touched, ues_per_cpu_master;
  double assoc_time_us_per_ue = 0.0;
  double signal_stderr_mean = 0.0;
  int precoder_fallbacks = 0;
  int degenerate_zscores = 0;
};

SchemeSetupStats aggregate(const Association& assoc,
                           const FronthaulReport& fronthaul,
                           const SeResult& se_result,
                           double assoc_time_us_per_ue, int num_aps,
                           int num_cpus);

// Cross-setup aggregate for one scheme.
struct SchemeReport {
  Scheme scheme = Scheme::HybridUA;
  double se_mean = 0.0;
  double se_median = 0.0;
  double jain_mean = 0.0;
  double outage5 = 0.0;
  double load_mean = 0.0;
  CountStats aps_per_ue, ues_per_ap, ues_per_cpu_touched, ues_per_cpu_master;
  double assoc_time_us_per_ue = 0.0;
  double signal_stderr_mean = 0.0;
  int precoder_fallbacks = 0;
  int degenerate_zscores = 0;
  std::vector<double> se_cdf;  // pooled sorted per-UE samples
  std::vector<double> load_per_setup;
  std::vector<double> jain_per_setup;
  std::vector<double> se_mean_per_setup;
  std::vector<double> assoc_time_per_setup;
};

SchemeReport reduce_setups(Scheme scheme,
                           const std::vector<SchemeSetupStats>& per_setup);

struct RunReport {
  ScenarioConfig config;
  std::vector<SchemeReport> schemes;
  bool deterministic = false;
  double wall_seconds = 0.0;

  const SchemeReport& scheme(Scheme s) const;
};

}  // namespace cfmimo
