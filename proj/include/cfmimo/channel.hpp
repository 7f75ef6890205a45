#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

struct LsfParams {
  double median_gain_db = -148.1;  // gain at the 1 km reference distance
  double pathloss_exponent = 3.76;
  double shadow_std_db = 10.0;
};

struct LsfcValue {
  double beta_db;
  double beta_lin;
};

// Distance-based LSFC: beta_db = median + shadow - 10*alpha*log10(d_km).
// Distances at or below 1 m are clamped to 1 m.
LsfcValue compute_lsfc(double d_km, double shadow_db, const LsfParams& params);

// Spatial correlation matrix with tr(R)/N == beta_lin.
// Uncorrelated: beta * I. LocalScattering: Gaussian local scattering around
// the nominal angle with the given angular standard deviation, half-wavelength
// antenna spacing, trace-renormalized.
Eigen::MatrixXcd build_correlation(double beta_lin, int num_antennas,
                                   CorrelationModel model,
                                   double asd_deg = 15.0,
                                   double nominal_angle_rad = 0.0);

// Per-setup large-scale fading state for all (UE, AP) pairs.
struct LsfState {
  Eigen::MatrixXd beta_db;   // K x L
  Eigen::MatrixXd beta_lin;  // K x L
  Eigen::MatrixXd dist_km;   // K x L (clamped)
  int antennas = 1;
  CorrelationModel model = CorrelationModel::Uncorrelated;
  double asd_deg = 15.0;
  // Only populated for LocalScattering; index k * L + l.
  std::vector<Eigen::MatrixXcd> corr;

  int num_ues() const { return static_cast<int>(beta_lin.rows()); }
  int num_aps() const { return static_cast<int>(beta_lin.cols()); }
  // Materializes beta*I for the uncorrelated model.
  Eigen::MatrixXcd correlation(int k, int l) const;
};

LsfState compute_lsf_state(const ScenarioConfig& config, const Topology& topo,
                           std::uint64_t seed);

// Factorized correlation matrices for drawing h = F g with F F^H = R.
// Negative eigenvalues (numerical) are clipped at zero; clip_count reports
// how many matrices needed it.
class ChannelSampler {
 public:
  ChannelSampler(const LsfState& lsf, std::uint64_t seed);

  // Fills H (N*L x K); column k stacks h_k1 .. h_kL. Deterministic per
  // (seed, trial, k, l) regardless of call order.
  void realization(int trial, Eigen::MatrixXcd& h_stacked) const;

  int dims() const { return antennas_ * num_aps_; }
  int num_ues() const { return num_ues_; }
  int clip_count() const { return clip_count_; }

 private:
  int antennas_, num_aps_, num_ues_;
  std::uint64_t key_;
  bool diagonal_ = true;
  Eigen::MatrixXd scale_;                 // K x L sqrt(beta) when diagonal
  std::vector<Eigen::MatrixXcd> factor_;  // k * L + l otherwise
  int clip_count_ = 0;
};

// Materialized batch of channel realizations (test-facing convenience).
struct ChannelBatch {
  std::vector<Eigen::MatrixXcd> trials;  // each N*L x K
  int antennas = 1;
};

ChannelBatch sample_channels(const LsfState& lsf, int count, std::uint64_t seed);

}  // namespace cfmimo
