#pragma once

#include <vector>

#include "cfmimo/association.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

// Inter-CPU relay bookkeeping for one association.
struct FronthaulReport {
  std::vector<std::vector<int>> ues_touched;    // K_u: UEs served by CPU u's APs
  std::vector<std::vector<int>> ues_mastered;   // K_u^dagger: UEs owned by u
  std::vector<std::vector<int>> relayed_aps;    // L_u^dagger: APs relayed to u
  long long intercpu_load_scalars = 0;          // sum |L_u^dagger| * N * tau_c
  long long ap_cpu_load_scalars = 0;            // (tau_p + tau_u + tau_d) * N per AP
};

// Builds K_u, K_u^dagger and L_u^dagger from an association whose master
// CPUs are already assigned. relayed_aps are sets: an AP relayed for several
// UEs of the same master CPU counts once.
FronthaulReport relay_sets(const Association& assoc, const Topology& topo);

// Inter-CPU fronthaul load in complex scalars per coherence block.
long long fronthaul_load(const FronthaulReport& report, int antennas, int tau_c);

FronthaulReport fronthaul_report(const Association& assoc, const Topology& topo,
                                 int antennas, int tau_c);

}  // namespace cfmimo
