#include "cfmimo/fronthaul.hpp"

#include <algorithm>

namespace cfmimo {

FronthaulReport relay_sets(const Association& assoc, const Topology& topo) {
  const int U = topo.num_cpus();
  FronthaulReport rep;
  rep.ues_touched.assign(U, {});
  rep.ues_mastered.assign(U, {});
  rep.relayed_aps.assign(U, {});

  for (int k = 0; k < assoc.num_ues(); ++k) {
    const AssociationEntry& e = assoc.entries[k];
    for (int u : e.serving_cpus) rep.ues_touched[u].push_back(k);
    rep.ues_mastered[e.master_cpu].push_back(k);
    // APs serving UE k outside the master CPU's own cluster must be relayed.
    for (int ap : e.serving_aps) {
      if (topo.ap_to_cpu[ap] != e.master_cpu) {
        rep.relayed_aps[e.master_cpu].push_back(ap);
      }
    }
  }
  for (int u = 0; u < U; ++u) {
    auto& aps = rep.relayed_aps[u];
    std::sort(aps.begin(), aps.end());
    aps.erase(std::unique(aps.begin(), aps.end()), aps.end());
  }
  return rep;
}

long long fronthaul_load(const FronthaulReport& report, int antennas,
                         int tau_c) {
  long long relayed = 0;
  for (const auto& aps : report.relayed_aps) relayed += static_cast<long long>(aps.size());
  return relayed * antennas * tau_c;
}

FronthaulReport fronthaul_report(const Association& assoc, const Topology& topo,
                                 int antennas, int tau_c) {
  FronthaulReport rep = relay_sets(assoc, topo);
  rep.intercpu_load_scalars = fronthaul_load(rep, antennas, tau_c);
  rep.ap_cpu_load_scalars = static_cast<long long>(tau_c) * antennas;
  return rep;
}

}  // namespace cfmimo
