#include "cfmimo/topology.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo {
namespace {

constexpr int kMaxLloydIterations = 100;
constexpr int kKmeansRestarts = 10;

double squared_dist(const Points2& pts, int i, const Points2& centroids, int c) {
  const double dx = pts(i, 0) - centroids(c, 0);
  const double dy = pts(i, 1) - centroids(c, 1);
  return dx * dx + dy * dy;
}

// k-means++ seeding. When all remaining mass is zero (duplicate points),
// falls back to the first point not already chosen.
Points2 seed_centroids(const Points2& pts, int k, Stream& rng) {
  const int n = static_cast<int>(pts.rows());
  Points2 centroids(k, 2);
  std::vector<char> chosen(n, 0);

  int first = std::min(static_cast<int>(rng.uniform() * n), n - 1);
  centroids.row(0) = pts.row(first);
  chosen[first] = 1;

  Eigen::VectorXd dist2(n);
  for (int i = 0; i < n; ++i) dist2(i) = squared_dist(pts, i, centroids, 0);

  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    int pick = -1;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (int i = 0; i < n; ++i) {
        r -= dist2(i);
        if (r <= 0.0) { pick = i; break; }
      }
      if (pick < 0) pick = n - 1;
    } else {
      for (int i = 0; i < n; ++i) {
        if (!chosen[i]) { pick = i; break; }
      }
      if (pick < 0) pick = c % n;
    }
    centroids.row(c) = pts.row(pick);
    chosen[pick] = 1;
    for (int i = 0; i < n; ++i) {
      dist2(i) = std::min(dist2(i), squared_dist(pts, i, centroids, c));
    }
  }
  return centroids;
}

}  // namespace

namespace {

KmeansResult kmeans_single_run(const Points2& points, int num_clusters,
                               std::uint64_t stream_key) {
  const int n = static_cast<int>(points.rows());
  Stream rng(stream_key);
  KmeansResult res;
  res.centroids = seed_centroids(points, num_clusters, rng);
  res.assignment.assign(n, -1);

  std::vector<int> counts(num_clusters, 0);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    // Assignment step; ties broken by lowest cluster index via strict <.
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_dist(points, i, res.centroids, 0);
      for (int c = 1; c < num_clusters; ++c) {
        const double d = squared_dist(points, i, res.centroids, c);
        if (d < best_d) { best_d = d; best = c; }
      }
      if (best != res.assignment[i]) { res.assignment[i] = best; changed = true; }
    }
    res.iterations = iter + 1;
    if (!changed && iter > 0) break;

    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) ++counts[res.assignment[i]];

    // Reseed empty clusters at the point farthest from its current centroid.
    for (int c = 0; c < num_clusters; ++c) {
      if (counts[c] > 0) continue;
      int far_idx = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[res.assignment[i]] <= 1) continue;  // keep donors nonempty
        const double d = squared_dist(points, i, res.centroids, res.assignment[i]);
        if (d > far_d) { far_d = d; far_idx = i; }
      }
      if (far_idx >= 0) {
        --counts[res.assignment[far_idx]];
        res.assignment[far_idx] = c;
        counts[c] = 1;
        changed = true;
        res.reseeded_empty_cluster = true;
      }
    }

    // Update step.
    res.centroids.setZero();
    for (int i = 0; i < n; ++i) res.centroids.row(res.assignment[i]) += points.row(i);
    for (int c = 0; c < num_clusters; ++c) {
      if (counts[c] > 0) res.centroids.row(c) /= counts[c];
    }
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      obj += squared_dist(points, i, res.centroids, res.assignment[i]);
    }
    res.objective_trace.push_back(obj);
    if (!changed) break;
  }

  res.objective = 0.0;
  for (int i = 0; i < n; ++i) {
    res.objective += squared_dist(points, i, res.centroids, res.assignment[i]);
  }
  return res;
}

}  // namespace

KmeansResult kmeans_ap_clustering(const Points2& points, int num_clusters,
                                  std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (num_clusters < 1) throw std::invalid_argument("kmeans: num_clusters must be >= 1");
  if (num_clusters > n) {
    throw std::invalid_argument("kmeans: more clusters than points");
  }

  // Several seeded restarts, keep the lowest objective. Ties keep the
  // earliest restart so results stay deterministic.
  KmeansResult best;
  for (int r = 0; r < kKmeansRestarts; ++r) {
    KmeansResult run = kmeans_single_run(
        points, num_clusters,
        derive_key(seed, Sub::Kmeans, {static_cast<std::uint64_t>(r)}));
    if (r == 0 || run.objective < best.objective) best = std::move(run);
  }
  return best;
}

Topology generate_topology(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  const int L = config.num_aps;
  const int K = config.num_ues;
  const int U = config.num_cpus;
  const double side = config.area_side_m;

  Topology topo;
  topo.ap_pos.resize(L, 2);
  topo.ue_pos.resize(K, 2);

  Stream ap_rng(derive_key(seed, Sub::ApPositions));
  for (int l = 0; l < L; ++l) {
    topo.ap_pos(l, 0) = ap_rng.uniform() * side;
    topo.ap_pos(l, 1) = ap_rng.uniform() * side;
  }
  Stream ue_rng(derive_key(seed, Sub::UePositions));
  for (int k = 0; k < K; ++k) {
    topo.ue_pos(k, 0) = ue_rng.uniform() * side;
    topo.ue_pos(k, 1) = ue_rng.uniform() * side;
  }

  KmeansResult km = kmeans_ap_clustering(topo.ap_pos, U, seed);
  topo.ap_to_cpu = km.assignment;
  topo.cpu_centroids = km.centroids;
  topo.cpu_aps.assign(U, {});
  for (int l = 0; l < L; ++l) topo.cpu_aps[km.assignment[l]].push_back(l);
  return topo;
}

}  // namespace cfmimo
