#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cfmimo {

enum class Scheme { HybridUA, Scf1, Scf2, Scf1Lim, Border, Llsfb, Nearest };

enum class CorrelationModel { Uncorrelated, LocalScattering };

const std::vector<Scheme>& all_schemes();
std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);
std::string correlation_model_name(CorrelationModel m);
CorrelationModel correlation_model_from_name(const std::string& name);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// One simulated scenario. Defaults follow the evaluation setup used
// throughout: 200 four-antenna APs grouped into 40 CPU clusters over an
// 8 km^2 square, 20 MHz coherence blocks of 200 samples (10 pilot, 190 DL).
struct ScenarioConfig {
  int num_ues = 50;          // K
  int num_aps = 200;         // L
  int antennas_per_ap = 4;   // N
  int num_cpus = 40;         // U
  double area_side_m = 2828.4271247461903;  // sqrt(8 km^2)

  int tau_p = 10;
  int tau_u = 0;
  int tau_d = 190;
  int tau_c = 200;

  double ul_power_mw = 100.0;      // per-UE pilot/UL transmit power p_k
  double ap_dl_power_mw = 200.0;   // per-AP DL budget P_AP
  double noise_power_dbm = -94.0;  // receiver noise, UL and DL

  double median_gain_db = -148.1;  // channel gain at 1 km
  double pathloss_exponent = 3.76;
  double shadow_std_db = 10.0;

  double zscore_threshold = 0.4;   // epsilon
  int max_clusters_per_ue = 2;     // upsilon
  double delta_percent = 95.0;     // LSFC contribution threshold
  double border_margin_m = 100.0;  // Border scheme edge distance

  double power_exponent = 0.0;     // fractional power allocation nu

  CorrelationModel correlation_model = CorrelationModel::Uncorrelated;
  double angular_spread_deg = 15.0;

  std::vector<Scheme> schemes = all_schemes();

  int num_setups = 4;
  int num_channel_realizations = 200;
  std::uint64_t rng_seed = 1;

  double noise_power_mw() const { return dbm_to_mw(noise_power_dbm); }
  double dl_fraction() const { return static_cast<double>(tau_d) / tau_c; }

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

}  // namespace cfmimo
