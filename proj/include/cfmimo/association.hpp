#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

// Serving sets for one UE. serving_cpus and master_cpu are filled by
// finalize_entry once serving_aps is decided.
struct AssociationEntry {
  std::vector<int> serving_aps;   // sorted ascending
  std::vector<int> serving_cpus;  // sorted ascending
  int master_cpu = -1;
  bool network_centric = false;   // HybridUA branch taken (diagnostic)
  bool degenerate_zscore = false;
};

struct Association {
  Scheme scheme = Scheme::HybridUA;
  std::vector<AssociationEntry> entries;  // per UE

  int num_ues() const { return static_cast<int>(entries.size()); }
};

// Sum of linear LSFCs per network-centric cluster: beta_ku.
Eigen::VectorXd cluster_gain(const Eigen::VectorXd& beta_row,
                             const Topology& topo);

struct ZscoreResult {
  Eigen::VectorXd z;
  bool degenerate = false;  // zero standard deviation
};

// Population z-scores (mean/std over the U cluster gains).
ZscoreResult zscores(const Eigen::VectorXd& beta_ku);

// Smallest prefix of the candidates (sorted by descending gain, ties by AP
// index) whose gain sum reaches delta% of the candidates' total.
std::vector<int> select_aps_by_delta(const std::vector<int>& candidate_aps,
                                     const Eigen::VectorXd& beta_row,
                                     double delta_percent);

// Master CPU: most serving APs, ties by larger served LSFC sum, then index.
int master_cpu_of(const std::vector<int>& serving_aps,
                  const Eigen::VectorXd& beta_row, const Topology& topo);

// Streaming schemes (one UE at a time, only row k of beta needed).
AssociationEntry associate_hybrid(const Eigen::VectorXd& beta_row,
                                  const Topology& topo, double epsilon,
                                  int upsilon, double delta_percent);
AssociationEntry associate_scf2(const Eigen::VectorXd& beta_row,
                                const Topology& topo);
AssociationEntry associate_border(const Eigen::Vector2d& ue_pos,
                                  const Eigen::VectorXd& beta_row,
                                  const Topology& topo, double delta_percent,
                                  double border_margin_m);
AssociationEntry associate_llsfb(const Eigen::VectorXd& beta_row,
                                 const Topology& topo, double delta_percent);
AssociationEntry associate_nearest(const Eigen::Vector2d& ue_pos,
                                   const Topology& topo);

// Batch schemes (per-pilot contests couple the UEs).
Association associate_scf1(const Eigen::MatrixXd& beta_lin,
                           const PilotAssignment& pilots,
                           const Topology& topo);
Association associate_scf1lim(const Association& scf1,
                              const Eigen::MatrixXd& beta_lin,
                              const Topology& topo, double delta_percent);

// Runs the requested scheme for all UEs.
Association associate_all(Scheme scheme, const Eigen::MatrixXd& beta_lin,
                          const PilotAssignment& pilots, const Topology& topo,
                          const ScenarioConfig& config);

}  // namespace cfmimo
