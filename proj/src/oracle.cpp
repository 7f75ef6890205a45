#include "cfmimo/oracle.hpp"

#include <set>
#include <stdexcept>
#include <utility>

namespace cfmimo {
namespace oracle {

long long fronthaul_load_by_enumeration(const Association& assoc,
                                        const Topology& topo, int antennas,
                                        int tau_c) {
  // (master CPU, AP) pairs needing a relay, deduplicated by the set.
  std::set<std::pair<int, int>> relays;
  for (const AssociationEntry& e : assoc.entries) {
    for (int ap : e.serving_aps) {
      bool ap_in_master_cluster = false;
      for (int candidate : topo.cpu_aps[e.master_cpu]) {
        if (candidate == ap) { ap_in_master_cluster = true; break; }
      }
      if (!ap_in_master_cluster) relays.insert({e.master_cpu, ap});
    }
  }
  return static_cast<long long>(relays.size()) * antennas * tau_c;
}

int min_subset_size_for_delta(const std::vector<double>& gains,
                              double delta_percent) {
  const int n = static_cast<int>(gains.size());
  if (n == 0) throw std::invalid_argument("oracle: empty gain vector");
  if (n > 20) throw std::invalid_argument("oracle: too many gains to enumerate");

  double total = 0.0;
  for (double g : gains) total += g;
  const double target = (delta_percent / 100.0) * total;

  int best = n;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int size = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) { sum += gains[i]; ++size; }
    }
    if (sum >= target && size < best) best = size;
  }
  return best;
}

}  // namespace oracle
}  // namespace cfmimo
