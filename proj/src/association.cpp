#include "cfmimo/association.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfmimo {
namespace {

// Fills serving_cpus and master_cpu from serving_aps.
void finalize_entry(AssociationEntry& e, const Eigen::VectorXd& beta_row,
                    const Topology& topo) {
  std::sort(e.serving_aps.begin(), e.serving_aps.end());
  e.serving_cpus.clear();
  for (int ap : e.serving_aps) {
    const int u = topo.ap_to_cpu[ap];
    if (std::find(e.serving_cpus.begin(), e.serving_cpus.end(), u) ==
        e.serving_cpus.end()) {
      e.serving_cpus.push_back(u);
    }
  }
  std::sort(e.serving_cpus.begin(), e.serving_cpus.end());
  e.master_cpu = master_cpu_of(e.serving_aps, beta_row, topo);
}

// Top-n cluster indices by gain, ties broken by lower CPU index.
std::vector<int> top_clusters(const Eigen::VectorXd& beta_ku, int n) {
  std::vector<int> order(beta_ku.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return beta_ku(a) > beta_ku(b);
  });
  order.resize(std::min<std::size_t>(order.size(), n));
  return order;
}

std::vector<int> union_of_clusters(const std::vector<int>& cpus,
                                   const Topology& topo) {
  std::vector<int> aps;
  for (int u : cpus) {
    aps.insert(aps.end(), topo.cpu_aps[u].begin(), topo.cpu_aps[u].end());
  }
  return aps;
}

}  // namespace

Eigen::VectorXd cluster_gain(const Eigen::VectorXd& beta_row,
                             const Topology& topo) {
  const int U = topo.num_cpus();
  Eigen::VectorXd beta_ku = Eigen::VectorXd::Zero(U);
  for (int u = 0; u < U; ++u) {
    for (int l : topo.cpu_aps[u]) beta_ku(u) += beta_row(l);
  }
  return beta_ku;
}

ZscoreResult zscores(const Eigen::VectorXd& beta_ku) {
  const int U = static_cast<int>(beta_ku.size());
  const double mean = beta_ku.mean();
  const double var = (beta_ku.array() - mean).square().sum() / U;
  const double sd = std::sqrt(var);
  ZscoreResult res;
  // Relative test: a constant vector accumulates rounding noise of a few
  // ulps, and sd/mean is invariant under gain scaling.
  if (sd <= 1e-9 * std::abs(mean)) {
    res.z = Eigen::VectorXd::Zero(U);
    res.degenerate = true;
    return res;
  }
  res.z = (beta_ku.array() - mean) / sd;
  return res;
}

std::vector<int> select_aps_by_delta(const std::vector<int>& candidate_aps,
                                     const Eigen::VectorXd& beta_row,
                                     double delta_percent) {
  if (candidate_aps.empty()) {
    throw std::invalid_argument("select_aps_by_delta: empty candidate set");
  }
  std::vector<int> order = candidate_aps;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (beta_row(a) != beta_row(b)) return beta_row(a) > beta_row(b);
    return a < b;
  });
  double total = 0.0;
  for (int ap : order) total += beta_row(ap);
  const double target = (delta_percent / 100.0) * total;

  std::vector<int> selected;
  double cum = 0.0;
  for (int ap : order) {
    selected.push_back(ap);
    cum += beta_row(ap);
    if (cum >= target) break;
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

int master_cpu_of(const std::vector<int>& serving_aps,
                  const Eigen::VectorXd& beta_row, const Topology& topo) {
  if (serving_aps.empty()) {
    throw std::invalid_argument("master_cpu_of: empty serving set");
  }
  const int U = topo.num_cpus();
  std::vector<int> count(U, 0);
  std::vector<double> gain(U, 0.0);
  for (int ap : serving_aps) {
    const int u = topo.ap_to_cpu[ap];
    ++count[u];
    gain[u] += beta_row(ap);
  }
  int best = -1;
  for (int u = 0; u < U; ++u) {
    if (count[u] == 0) continue;
    if (best < 0 || count[u] > count[best] ||
        (count[u] == count[best] && gain[u] > gain[best])) {
      best = u;
    }
  }
  return best;
}

AssociationEntry associate_hybrid(const Eigen::VectorXd& beta_row,
                                  const Topology& topo, double epsilon,
                                  int upsilon, double delta_percent) {
  const Eigen::VectorXd beta_ku = cluster_gain(beta_row, topo);
  const ZscoreResult zs = zscores(beta_ku);

  AssociationEntry e;
  e.degenerate_zscore = zs.degenerate;

  int argmax_u = 0;
  beta_ku.maxCoeff(&argmax_u);

  std::vector<int> top;
  if (!zs.degenerate) {
    const int above = static_cast<int>((zs.z.array() >= epsilon).count());
    if (above == 1 && zs.z(argmax_u) >= epsilon) {
      e.network_centric = true;
      top = {argmax_u};
    }
  }
  if (!e.network_centric) {
    top = top_clusters(beta_ku, upsilon);
  }

  e.serving_aps = select_aps_by_delta(union_of_clusters(top, topo), beta_row,
                                      delta_percent);
  finalize_entry(e, beta_row, topo);
  return e;
}

AssociationEntry associate_scf2(const Eigen::VectorXd& beta_row,
                                const Topology& topo) {
  const Eigen::VectorXd beta_ku = cluster_gain(beta_row, topo);
  const std::vector<int> top = top_clusters(beta_ku, 2);
  AssociationEntry e;
  e.serving_aps = union_of_clusters(top, topo);
  finalize_entry(e, beta_row, topo);
  return e;
}

AssociationEntry associate_border(const Eigen::Vector2d& ue_pos,
                                  const Eigen::VectorXd& beta_row,
                                  const Topology& topo, double delta_percent,
                                  double border_margin_m) {
  const int U = topo.num_cpus();
  int first = 0, second = -1;
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  for (int u = 0; u < U; ++u) {
    const double d = (topo.cpu_centroids.row(u).transpose() - ue_pos).norm();
    if (d < d1) {
      second = first; d2 = d1;
      first = u; d1 = d;
    } else if (d < d2) {
      second = u; d2 = d;
    }
  }

  AssociationEntry e;
  // Edge UE: closer than the margin to the bisector between the two
  // nearest cluster centroids. Edge UEs are served by both clusters
  // (delta-selection inside each), interior UEs by the nearest only.
  const bool edge = (U > 1) && ((d2 - d1) / 2.0 < border_margin_m);
  if (edge) {
    e.serving_aps =
        select_aps_by_delta(topo.cpu_aps[first], beta_row, delta_percent);
    const std::vector<int> other =
        select_aps_by_delta(topo.cpu_aps[second], beta_row, delta_percent);
    e.serving_aps.insert(e.serving_aps.end(), other.begin(), other.end());
  } else {
    e.serving_aps =
        select_aps_by_delta(topo.cpu_aps[first], beta_row, delta_percent);
  }
  finalize_entry(e, beta_row, topo);
  return e;
}

AssociationEntry associate_llsfb(const Eigen::VectorXd& beta_row,
                                 const Topology& topo, double delta_percent) {
  const Eigen::VectorXd beta_ku = cluster_gain(beta_row, topo);
  int best = 0;
  beta_ku.maxCoeff(&best);
  AssociationEntry e;
  e.serving_aps = select_aps_by_delta(topo.cpu_aps[best], beta_row,
                                      delta_percent);
  finalize_entry(e, beta_row, topo);
  return e;
}

AssociationEntry associate_nearest(const Eigen::Vector2d& ue_pos,
                                   const Topology& topo) {
  const int U = topo.num_cpus();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int u = 0; u < U; ++u) {
    const double d = (topo.cpu_centroids.row(u).transpose() - ue_pos).norm();
    if (d < best_d) { best_d = d; best = u; }
  }
  AssociationEntry e;
  e.serving_aps = topo.cpu_aps[best];
  e.serving_cpus = {best};
  e.master_cpu = best;
  return e;
}

Association associate_scf1(const Eigen::MatrixXd& beta_lin,
                           const PilotAssignment& pilots,
                           const Topology& topo) {
  const int K = static_cast<int>(beta_lin.rows());
  const int L = topo.num_aps();

  std::vector<int> master_ap(K);
  for (int k = 0; k < K; ++k) {
    int ap = 0;
    beta_lin.row(k).maxCoeff(&ap);
    master_ap[k] = ap;
  }

  Association assoc;
  assoc.scheme = Scheme::Scf1;
  assoc.entries.resize(K);
  for (int k = 0; k < K; ++k) assoc.entries[k].serving_aps = {master_ap[k]};

  // Per (AP, pilot): serve one UE. A UE that appointed this AP as its master
  // takes priority (strongest such, then lowest index); otherwise the
  // strongest co-pilot UE wins. This keeps each AP at <= tau_p served UEs.
  for (int l = 0; l < L; ++l) {
    for (int t = 0; t < pilots.tau_p; ++t) {
      int winner = -1;
      bool winner_appointed = false;
      for (int k : pilots.copilots[t]) {
        const bool appointed = (master_ap[k] == l);
        if (winner < 0 ||
            (appointed && !winner_appointed) ||
            (appointed == winner_appointed && beta_lin(k, l) > beta_lin(winner, l))) {
          winner = k;
          winner_appointed = appointed;
        }
      }
      if (winner >= 0 && master_ap[winner] != l) {
        assoc.entries[winner].serving_aps.push_back(l);
      }
    }
  }

  for (int k = 0; k < K; ++k) {
    finalize_entry(assoc.entries[k], beta_lin.row(k), topo);
  }
  return assoc;
}

Association associate_scf1lim(const Association& scf1,
                              const Eigen::MatrixXd& beta_lin,
                              const Topology& topo, double delta_percent) {
  Association out = scf1;
  out.scheme = Scheme::Scf1Lim;
  const double cross_cap = 1.0 - delta_percent / 100.0;

  for (int k = 0; k < out.num_ues(); ++k) {
    AssociationEntry& e = out.entries[k];
    if (e.serving_cpus.size() <= 1) continue;

    double total = 0.0, cross = 0.0;
    for (int ap : e.serving_aps) {
      total += beta_lin(k, ap);
      if (topo.ap_to_cpu[ap] != e.master_cpu) cross += beta_lin(k, ap);
    }
    if (total <= 0.0 || cross / total >= cross_cap) continue;

    // Weak cross-CPU share: keep only the master CPU's APs.
    std::vector<int> trimmed;
    for (int ap : e.serving_aps) {
      if (topo.ap_to_cpu[ap] == e.master_cpu) trimmed.push_back(ap);
    }
    e.serving_aps = std::move(trimmed);
    finalize_entry(e, beta_lin.row(k), topo);
  }
  return out;
}

Association associate_all(Scheme scheme, const Eigen::MatrixXd& beta_lin,
                          const PilotAssignment& pilots, const Topology& topo,
                          const ScenarioConfig& config) {
  const int K = static_cast<int>(beta_lin.rows());
  if (scheme == Scheme::Scf1) return associate_scf1(beta_lin, pilots, topo);
  if (scheme == Scheme::Scf1Lim) {
    return associate_scf1lim(associate_scf1(beta_lin, pilots, topo), beta_lin,
                             topo, config.delta_percent);
  }

  Association assoc;
  assoc.scheme = scheme;
  assoc.entries.reserve(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd row = beta_lin.row(k);
    switch (scheme) {
      case Scheme::HybridUA:
        assoc.entries.push_back(associate_hybrid(row, topo,
                                                 config.zscore_threshold,
                                                 config.max_clusters_per_ue,
                                                 config.delta_percent));
        break;
      case Scheme::Scf2:
        assoc.entries.push_back(associate_scf2(row, topo));
        break;
      case Scheme::Border:
        assoc.entries.push_back(associate_border(
            topo.ue_pos.row(k).transpose(), row, topo, config.delta_percent,
            config.border_margin_m));
        break;
      case Scheme::Llsfb:
        assoc.entries.push_back(associate_llsfb(row, topo,
                                                config.delta_percent));
        break;
      case Scheme::Nearest:
        assoc.entries.push_back(
            associate_nearest(topo.ue_pos.row(k).transpose(), topo));
        break;
      default:
        throw std::invalid_argument("associate_all: unexpected scheme");
    }
  }
  return assoc;
}

}  // namespace cfmimo
