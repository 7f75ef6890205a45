#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cfmimo {

struct PilotAssignment {
  std::vector<int> pilot_of_ue;            // t_k in [0, tau_p)
  std::vector<std::vector<int>> copilots;  // per pilot, sorted UE ids
  int tau_p = 0;

  int num_ues() const { return static_cast<int>(pilot_of_ue.size()); }
};

// Online heuristic: UEs arrive in index order; each picks the pilot with the
// least contamination at its master AP (argmax beta), ties to the lowest
// pilot index.
PilotAssignment assign_pilots(const Eigen::MatrixXd& beta_lin, int tau_p);

}  // namespace cfmimo
