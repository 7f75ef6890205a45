#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfmimo/config.hpp"

namespace cfmimo {

using Points2 = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Static network layout: AP/UE positions and the AP->CPU partition.
struct Topology {
  Points2 ap_pos;  // L x 2, meters
  Points2 ue_pos;  // K x 2, meters
  std::vector<int> ap_to_cpu;             // size L
  std::vector<std::vector<int>> cpu_aps;  // size U, each sorted ascending
  Points2 cpu_centroids;                  // U x 2

  int num_aps() const { return static_cast<int>(ap_pos.rows()); }
  int num_ues() const { return static_cast<int>(ue_pos.rows()); }
  int num_cpus() const { return static_cast<int>(cpu_centroids.rows()); }
};

struct KmeansResult {
  std::vector<int> assignment;  // point -> cluster
  Points2 centroids;
  int iterations = 0;
  double objective = 0.0;  // within-cluster sum of squared distances
  std::vector<double> objective_trace;  // after each update step
  bool reseeded_empty_cluster = false;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic given seed.
// Empty clusters are reseeded at the point farthest from its own centroid.
// Throws std::invalid_argument if num_clusters exceeds the point count.
KmeansResult kmeans_ap_clustering(const Points2& points, int num_clusters,
                                  std::uint64_t seed);

// Uniform AP/UE placement over the square plus k-means AP->CPU association.
Topology generate_topology(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace cfmimo
