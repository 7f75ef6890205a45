#include "cfmimo/config.hpp"

#include <stdexcept>

namespace cfmimo {

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> schemes = {
      Scheme::HybridUA, Scheme::Scf1,  Scheme::Scf2,   Scheme::Scf1Lim,
      Scheme::Border,   Scheme::Llsfb, Scheme::Nearest};
  return schemes;
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::HybridUA: return "HybridUA";
    case Scheme::Scf1: return "SCF1";
    case Scheme::Scf2: return "SCF2";
    case Scheme::Scf1Lim: return "SCF1lim";
    case Scheme::Border: return "Border";
    case Scheme::Llsfb: return "LLSFB";
    case Scheme::Nearest: return "Nearest";
  }
  throw std::invalid_argument("unknown scheme enum value");
}

Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : all_schemes()) {
    if (scheme_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme name: " + name);
}

std::string correlation_model_name(CorrelationModel m) {
  return m == CorrelationModel::Uncorrelated ? "uncorrelated"
                                             : "local_scattering";
}

CorrelationModel correlation_model_from_name(const std::string& name) {
  if (name == "uncorrelated") return CorrelationModel::Uncorrelated;
  if (name == "local_scattering") return CorrelationModel::LocalScattering;
  throw std::invalid_argument("unknown correlation model: " + name);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid config: " + what);
  };
  if (num_ues < 1) fail("num_ues must be >= 1");
  if (num_aps < 1) fail("num_aps must be >= 1");
  if (antennas_per_ap < 1) fail("antennas_per_ap must be >= 1");
  if (num_cpus < 1) fail("num_cpus must be >= 1");
  if (num_cpus > num_aps) fail("num_cpus must not exceed num_aps");
  if (!(area_side_m > 0.0)) fail("area_side_m must be > 0");
  if (tau_p < 1) fail("tau_p must be >= 1");
  if (tau_u < 0 || tau_d < 0) fail("tau_u and tau_d must be >= 0");
  if (tau_p + tau_u + tau_d != tau_c) fail("tau_p + tau_u + tau_d must equal tau_c");
  if (!(ul_power_mw > 0.0)) fail("ul_power_mw must be > 0");
  if (!(ap_dl_power_mw > 0.0)) fail("ap_dl_power_mw must be > 0");
  if (!(delta_percent > 0.0 && delta_percent <= 100.0)) fail("delta_percent must be in (0, 100]");
  if (max_clusters_per_ue < 1) fail("max_clusters_per_ue must be >= 1");
  if (!(border_margin_m >= 0.0)) fail("border_margin_m must be >= 0");
  if (!(angular_spread_deg > 0.0)) fail("angular_spread_deg must be > 0");
  if (schemes.empty()) fail("schemes must be nonempty");
  if (num_setups < 1) fail("num_setups must be >= 1");
  if (num_channel_realizations < 1) fail("num_channel_realizations must be >= 1");
}

}  // namespace cfmimo
