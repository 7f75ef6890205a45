#include "cfmimo/pilots.hpp"

#include <stdexcept>

namespace cfmimo {

PilotAssignment assign_pilots(const Eigen::MatrixXd& beta_lin, int tau_p) {
  if (tau_p < 1) throw std::invalid_argument("assign_pilots: tau_p must be >= 1");
  const int K = static_cast<int>(beta_lin.rows());

  PilotAssignment pa;
  pa.tau_p = tau_p;
  pa.pilot_of_ue.resize(K);
  pa.copilots.assign(tau_p, {});

  // Contamination seen at UE k's master AP, accumulated per pilot as UEs join.
  Eigen::VectorXd contamination(tau_p);
  for (int k = 0; k < K; ++k) {
    int master_ap = 0;
    beta_lin.row(k).maxCoeff(&master_ap);

    contamination.setZero();
    for (int t = 0; t < tau_p; ++t) {
      for (int i : pa.copilots[t]) contamination(t) += beta_lin(i, master_ap);
    }
    int pilot = 0;
    contamination.minCoeff(&pilot);  // ties resolve to the lowest index

    pa.pilot_of_ue[k] = pilot;
    pa.copilots[pilot].push_back(k);
  }
  return pa;
}

}  // namespace cfmimo
