#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfmimo/association.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {
namespace oracle {

// Reference implementations kept deliberately independent of the production
// accounting: straight enumeration, no shared helpers. Used by the test
// suites and by the `oracle` CLI verb on tiny instances.

// Inter-CPU load by walking, per UE, every serving AP outside the master
// CPU's cluster and unioning per master CPU.
long long fronthaul_load_by_enumeration(const Association& assoc,
                                        const Topology& topo, int antennas,
                                        int tau_c);

// Minimum-cardinality subset of gains whose sum reaches delta% of the total,
// by exhaustive subset enumeration. Returns the cardinality (gains.size()
// must stay small enough for 2^n enumeration).
int min_subset_size_for_delta(const std::vector<double>& gains,
                              double delta_percent);

}  // namespace oracle
}  // namespace cfmimo
