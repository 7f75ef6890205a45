#include "cfmimo/channel.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "cfmimo/rng.hpp"

namespace cfmimo {

namespace {
constexpr double kMinDistanceKm = 1e-3;  // 1 m clamp against singular path loss
}

LsfcValue compute_lsfc(double d_km, double shadow_db, const LsfParams& params) {
  const double d = std::max(d_km, kMinDistanceKm);
  const double beta_db = params.median_gain_db -
                         10.0 * params.pathloss_exponent * std::log10(d) +
                         shadow_db;
  return {beta_db, db_to_linear(beta_db)};
}

Eigen::MatrixXcd build_correlation(double beta_lin, int num_antennas,
                                   CorrelationModel model, double asd_deg,
                                   double nominal_angle_rad) {
  const int n = num_antennas;
  if (model == CorrelationModel::Uncorrelated || n == 1) {
    return beta_lin * Eigen::MatrixXcd::Identity(n, n);
  }
  // Gaussian local scattering, half-wavelength uniform linear array.
  const double asd = asd_deg * std::numbers::pi / 180.0;
  const double sin_phi = std::sin(nominal_angle_rad);
  const double cos_phi = std::cos(nominal_angle_rad);
  Eigen::MatrixXcd r(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const double gap = std::numbers::pi * (p - q);  // 2*pi*spacing, spacing=1/2
      const double phase = gap * sin_phi;
      const double damp = std::exp(-0.5 * asd * asd * gap * gap * cos_phi * cos_phi);
      r(p, q) = damp * std::polar(1.0, phase);
    }
  }
  // Renormalize so tr(R)/N equals beta exactly.
  const double tr = r.trace().real();
  r *= beta_lin * n / tr;
  return r;
}

Eigen::MatrixXcd LsfState::correlation(int k, int l) const {
  if (model == CorrelationModel::LocalScattering) {
    return corr[static_cast<std::size_t>(k) * num_aps() + l];
  }
  return beta_lin(k, l) *
         Eigen::MatrixXcd::Identity(antennas, antennas);
}

LsfState compute_lsf_state(const ScenarioConfig& config, const Topology& topo,
                           std::uint64_t seed) {
  const int K = topo.num_ues();
  const int L = topo.num_aps();
  LsfState lsf;
  lsf.antennas = config.antennas_per_ap;
  lsf.model = config.correlation_model;
  lsf.asd_deg = config.angular_spread_deg;
  lsf.beta_db.resize(K, L);
  lsf.beta_lin.resize(K, L);
  lsf.dist_km.resize(K, L);

  const LsfParams params{config.median_gain_db, config.pathloss_exponent,
                         config.shadow_std_db};
  Stream shadow_rng(derive_key(seed, Sub::Shadowing));
  int clamped = 0;
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const double d_m = (topo.ue_pos.row(k) - topo.ap_pos.row(l)).norm();
      clamped += d_m < 1.0;
      const double d_km = std::max(d_m / 1000.0, kMinDistanceKm);
      const double shadow = config.shadow_std_db * shadow_rng.gauss();
      const LsfcValue v = compute_lsfc(d_km, shadow, params);
      lsf.dist_km(k, l) = d_km;
      lsf.beta_db(k, l) = v.beta_db;
      lsf.beta_lin(k, l) = v.beta_lin;
    }
  }
  if (clamped > 0) {
    std::cerr << "[cfmimo] warning: clamped " << clamped
              << " UE-AP distances at the 1 m floor\n";
  }

  if (lsf.model == CorrelationModel::LocalScattering) {
    lsf.corr.reserve(static_cast<std::size_t>(K) * L);
    for (int k = 0; k < K; ++k) {
      for (int l = 0; l < L; ++l) {
        const double angle = std::atan2(topo.ue_pos(k, 1) - topo.ap_pos(l, 1),
                                        topo.ue_pos(k, 0) - topo.ap_pos(l, 0));
        lsf.corr.push_back(build_correlation(lsf.beta_lin(k, l), lsf.antennas,
                                             lsf.model, lsf.asd_deg, angle));
      }
    }
  }
  return lsf;
}

ChannelSampler::ChannelSampler(const LsfState& lsf, std::uint64_t seed)
    : antennas_(lsf.antennas),
      num_aps_(lsf.num_aps()),
      num_ues_(lsf.num_ues()),
      key_(derive_key(seed, Sub::Channel)),
      diagonal_(lsf.model == CorrelationModel::Uncorrelated) {
  const int n = antennas_;
  if (diagonal_) {
    scale_ = lsf.beta_lin.cwiseSqrt();
    return;
  }
  factor_.reserve(static_cast<std::size_t>(num_ues_) * num_aps_);
  for (int k = 0; k < num_ues_; ++k) {
    for (int l = 0; l < num_aps_; ++l) {
      const Eigen::MatrixXcd r = lsf.correlation(k, l);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
      Eigen::VectorXd ev = es.eigenvalues();
      bool clipped = false;
      for (int i = 0; i < n; ++i) {
        if (ev(i) < 0.0) { ev(i) = 0.0; clipped = true; }
      }
      if (clipped) ++clip_count_;
      factor_.push_back(es.eigenvectors() *
                        ev.cwiseSqrt().asDiagonal() *
                        es.eigenvectors().adjoint());
    }
  }
  if (clip_count_ > 0) {
    std::cerr << "[cfmimo] warning: clipped negative eigenvalues in "
              << clip_count_ << " correlation matrices\n";
  }
}

void ChannelSampler::realization(int trial, Eigen::MatrixXcd& h_stacked) const {
  const int n = antennas_;
  h_stacked.resize(static_cast<Eigen::Index>(n) * num_aps_, num_ues_);
  Eigen::VectorXcd g(n);
  for (int k = 0; k < num_ues_; ++k) {
    for (int l = 0; l < num_aps_; ++l) {
      Stream rng(derive_key(key_, {static_cast<std::uint64_t>(trial),
                                   static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(l)}));
      for (int a = 0; a < n; ++a) g(a) = rng.cgauss();
      auto block = h_stacked.block(static_cast<Eigen::Index>(l) * n, k, n, 1);
      if (diagonal_) {
        block.noalias() = scale_(k, l) * g;
      } else {
        block.noalias() =
            factor_[static_cast<std::size_t>(k) * num_aps_ + l] * g;
      }
    }
  }
}

ChannelBatch sample_channels(const LsfState& lsf, int count, std::uint64_t seed) {
  ChannelSampler sampler(lsf, seed);
  ChannelBatch batch;
  batch.antennas = lsf.antennas;
  batch.trials.resize(count);
  for (int t = 0; t < count; ++t) sampler.realization(t, batch.trials[t]);
  return batch;
}

}  // namespace cfmimo
