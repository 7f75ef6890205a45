#include "cfmimo/phy.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo {

Eigen::MatrixXcd received_pilots(const Eigen::MatrixXcd& h_stacked,
                                 const PilotAssignment& pilots, int antennas,
                                 const Eigen::VectorXd& ul_power_mw,
                                 double noise_mw, std::uint64_t noise_key,
                                 int trial) {
  const int n = antennas;
  const int num_aps = static_cast<int>(h_stacked.rows()) / n;
  const int tau_p = pilots.tau_p;
  const double noise_amp = std::sqrt(noise_mw);

  Eigen::MatrixXcd y(n, static_cast<Eigen::Index>(tau_p) * num_aps);
  for (int t = 0; t < tau_p; ++t) {
    for (int l = 0; l < num_aps; ++l) {
      auto col = y.col(static_cast<Eigen::Index>(t) * num_aps + l);
      Stream rng(derive_key(noise_key, {static_cast<std::uint64_t>(trial),
                                        static_cast<std::uint64_t>(t),
                                        static_cast<std::uint64_t>(l)}));
      for (int a = 0; a < n; ++a) col(a) = noise_amp * rng.cgauss();
      for (int i : pilots.copilots[t]) {
        col += std::sqrt(tau_p * ul_power_mw(i)) *
               h_stacked.block(static_cast<Eigen::Index>(l) * n, i, n, 1);
      }
    }
  }
  return y;
}

EstimatorContext build_estimator_context(const LsfState& lsf,
                                         const PilotAssignment& pilots,
                                         const Eigen::VectorXd& ul_power_mw,
                                         double noise_mw) {
  const int n = lsf.antennas;
  const int L = lsf.num_aps();
  const int K = lsf.num_ues();
  const int tau_p = pilots.tau_p;

  EstimatorContext est;
  est.antennas = n;
  est.num_aps = L;
  est.num_ues = K;
  est.tau_p = tau_p;
  est.noise_mw = noise_mw;
  est.sqrt_tp_p.resize(K);
  for (int k = 0; k < K; ++k) est.sqrt_tp_p(k) = std::sqrt(tau_p * ul_power_mw(k));

  est.psi_llt.resize(static_cast<std::size_t>(tau_p) * L);
  Eigen::MatrixXcd psi(n, n);
  for (int t = 0; t < tau_p; ++t) {
    for (int l = 0; l < L; ++l) {
      psi = noise_mw * Eigen::MatrixXcd::Identity(n, n);
      for (int i : pilots.copilots[t]) {
        psi += (tau_p * ul_power_mw(i)) * lsf.correlation(i, l);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(psi,
                                                         Eigen::EigenvaluesOnly);
      const double cond = es.eigenvalues()(n - 1) / es.eigenvalues()(0);
      est.max_psi_condition = std::max(est.max_psi_condition, cond);
      est.psi_llt[static_cast<std::size_t>(t) * L + l].compute(psi);
    }
  }
  if (est.max_psi_condition > 1e12) {
    std::cerr << "[cfmimo] warning: pilot covariance condition number "
              << est.max_psi_condition << "\n";
  }

  est.err_cov.resize(static_cast<std::size_t>(K) * L);
  for (int k = 0; k < K; ++k) {
    const int t = pilots.pilot_of_ue[k];
    const double tp_p = est.sqrt_tp_p(k) * est.sqrt_tp_p(k);
    for (int l = 0; l < L; ++l) {
      const Eigen::MatrixXcd r = lsf.correlation(k, l);
      const auto& llt = est.psi_llt[static_cast<std::size_t>(t) * L + l];
      est.err_cov[static_cast<std::size_t>(k) * L + l] =
          r - tp_p * r * llt.solve(r);
    }
  }
  return est;
}

Eigen::VectorXcd mmse_estimate(const Eigen::MatrixXcd& corr,
                               const Eigen::MatrixXcd& psi,
                               const Eigen::VectorXcd& y_pilot,
                               double sqrt_tp_p) {
  Eigen::LLT<Eigen::MatrixXcd> llt(psi);
  return sqrt_tp_p * corr * llt.solve(y_pilot);
}

void mmse_estimate_all(const EstimatorContext& est, const LsfState& lsf,
                       const PilotAssignment& pilots,
                       const Eigen::MatrixXcd& y_pilot,
                       Eigen::MatrixXcd& hhat) {
  const int n = est.antennas;
  const int L = est.num_aps;
  const int K = est.num_ues;
  hhat.resize(static_cast<Eigen::Index>(n) * L, K);

  // Psi^-1 y per (pilot, AP), then one correlation product per (UE, AP).
  Eigen::MatrixXcd solved(n, static_cast<Eigen::Index>(est.tau_p) * L);
  for (int t = 0; t < est.tau_p; ++t) {
    for (int l = 0; l < L; ++l) {
      const auto idx = static_cast<Eigen::Index>(t) * L + l;
      solved.col(idx) = est.psi_llt[idx].solve(y_pilot.col(idx));
    }
  }
  const bool diag = (lsf.model == CorrelationModel::Uncorrelated);
  for (int k = 0; k < K; ++k) {
    const int t = pilots.pilot_of_ue[k];
    for (int l = 0; l < L; ++l) {
      const auto src = solved.col(static_cast<Eigen::Index>(t) * L + l);
      auto dst = hhat.block(static_cast<Eigen::Index>(l) * n, k, n, 1);
      if (diag) {
        dst = (est.sqrt_tp_p(k) * lsf.beta_lin(k, l)) * src;
      } else {
        dst.noalias() = est.sqrt_tp_p(k) * (lsf.correlation(k, l) * src);
      }
    }
  }
}

PrecoderPlan build_precoder_plan(const Association& assoc,
                                 const EstimatorContext& est,
                                 const Eigen::VectorXd& ul_power_mw) {
  const int n = est.antennas;
  const int L = est.num_aps;
  const int K = assoc.num_ues();

  PrecoderPlan plan;
  plan.antennas = n;
  plan.dims.resize(K);
  plan.partial.resize(K);
  plan.reg_blocks.resize(K);

  std::vector<std::vector<int>> ues_of_ap(L);
  for (int k = 0; k < K; ++k) {
    for (int ap : assoc.entries[k].serving_aps) ues_of_ap[ap].push_back(k);
  }

  std::vector<char> in_partial(K, 0);
  for (int k = 0; k < K; ++k) {
    const auto& aps = assoc.entries[k].serving_aps;
    auto& dims = plan.dims[k];
    dims.reserve(aps.size() * n);
    for (int ap : aps) {
      for (int a = 0; a < n; ++a) dims.push_back(ap * n + a);
    }

    auto& partial = plan.partial[k];
    for (int ap : aps) {
      for (int i : ues_of_ap[ap]) {
        if (!in_partial[i]) { in_partial[i] = 1; partial.push_back(i); }
      }
    }
    std::sort(partial.begin(), partial.end());
    for (int i : partial) in_partial[i] = 0;

    auto& blocks = plan.reg_blocks[k];
    blocks.reserve(aps.size());
    for (int ap : aps) {
      Eigen::MatrixXcd block =
          est.noise_mw * Eigen::MatrixXcd::Identity(n, n);
      for (int i : partial) {
        block += ul_power_mw(i) *
                 est.err_cov[static_cast<std::size_t>(i) * L + ap];
      }
      blocks.push_back(std::move(block));
    }
  }
  return plan;
}

void pmmse_raw(const PrecoderPlan& plan, const Eigen::MatrixXcd& hhat,
               const Eigen::VectorXd& ul_power_mw,
               std::vector<Eigen::VectorXcd>& w_raw, int* fallback_count) {
  const int K = static_cast<int>(plan.dims.size());
  const int n = plan.antennas;
  w_raw.resize(K);

  Eigen::MatrixXcd gathered, gram;
  Eigen::VectorXcd rhs;
  for (int k = 0; k < K; ++k) {
    const auto& dims = plan.dims[k];
    const int d = static_cast<int>(dims.size());
    const auto& partial = plan.partial[k];

    rhs = hhat(dims, std::vector<int>{k});
    if (rhs.norm() == 0.0) {
      // Nothing to steer towards: fall back to a uniform precoder.
      w_raw[k] = Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(double(d)));
      if (fallback_count) ++(*fallback_count);
      continue;
    }

    gathered = hhat(dims, partial);
    for (int j = 0; j < static_cast<int>(partial.size()); ++j) {
      gathered.col(j) *= std::sqrt(ul_power_mw(partial[j]));
    }

    gram.setZero(d, d);
    for (int j = 0; j < d / n; ++j) {
      gram.block(static_cast<Eigen::Index>(j) * n,
                 static_cast<Eigen::Index>(j) * n, n, n) =
          plan.reg_blocks[k][j];
    }
    gram.selfadjointView<Eigen::Lower>().rankUpdate(gathered);

    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    w_raw[k] = llt.solve(rhs);
  }
}

std::vector<std::vector<Eigen::VectorXcd>> normalize_precoders(
    const std::vector<std::vector<Eigen::VectorXcd>>& raw_per_trial) {
  const int trials = static_cast<int>(raw_per_trial.size());
  if (trials == 0) return {};
  const int K = static_cast<int>(raw_per_trial[0].size());

  Eigen::VectorXd mean_norm2 = Eigen::VectorXd::Zero(K);
  for (const auto& trial : raw_per_trial) {
    for (int k = 0; k < K; ++k) mean_norm2(k) += trial[k].squaredNorm();
  }
  mean_norm2 /= trials;

  auto out = raw_per_trial;
  for (auto& trial : out) {
    for (int k = 0; k < K; ++k) {
      if (mean_norm2(k) > 0.0) trial[k] /= std::sqrt(mean_norm2(k));
    }
  }
  return out;
}

void DlMoments::init(int num_ues, int num_aps) {
  signal.setZero(num_ues, num_ues);
  power.setZero(num_ues, num_ues);
  norm2.setZero(num_ues);
  ap_norm2.setZero(num_ues, num_aps);
  trials = 0;
  finalized = false;
}

void DlMoments::accumulate(const PrecoderPlan& plan, const Association& assoc,
                           const Eigen::MatrixXcd& h_stacked,
                           const std::vector<Eigen::VectorXcd>& w_raw) {
  const int K = static_cast<int>(plan.dims.size());
  const int n = plan.antennas;

  Eigen::MatrixXcd h_sub;
  Eigen::VectorXcd z;
  for (int i = 0; i < K; ++i) {
    const auto& dims = plan.dims[i];
    h_sub = h_stacked(dims, Eigen::all);
    z.noalias() = h_sub.adjoint() * w_raw[i];
    signal.col(i) += z;
    power.col(i) += z.cwiseAbs2();
    norm2(i) += w_raw[i].squaredNorm();
    const auto& aps = assoc.entries[i].serving_aps;
    for (int j = 0; j < static_cast<int>(aps.size()); ++j) {
      ap_norm2(i, aps[j]) +=
          w_raw[i].segment(static_cast<Eigen::Index>(j) * n, n).squaredNorm();
    }
  }
  ++trials;
}

void DlMoments::finalize() {
  if (finalized || trials == 0) return;
  signal /= trials;
  power /= trials;
  norm2 /= trials;
  ap_norm2 /= trials;
  finalized = true;
}

Eigen::MatrixXd DlMoments::normalized_ap_energy() const {
  Eigen::MatrixXd e = ap_norm2;
  for (int i = 0; i < e.rows(); ++i) {
    if (norm2(i) > 0.0) e.row(i) /= norm2(i);
  }
  return e;
}

PowerAllocation fractional_power_allocation(const Association& assoc,
                                            const Eigen::MatrixXd& beta_lin,
                                            const Eigen::MatrixXd& e_norm,
                                            double p_ap_mw, double nu) {
  const int K = assoc.num_ues();
  const int L = static_cast<int>(e_norm.cols());

  Eigen::VectorXd weight(K);
  for (int k = 0; k < K; ++k) {
    double served = 0.0;
    for (int ap : assoc.entries[k].serving_aps) served += beta_lin(k, ap);
    weight(k) = std::pow(served, nu);
  }

  // Largest scale keeping every AP within budget.
  Eigen::VectorXd usage = Eigen::VectorXd::Zero(L);
  for (int k = 0; k < K; ++k) {
    for (int ap : assoc.entries[k].serving_aps) {
      usage(ap) += weight(k) * e_norm(k, ap);
    }
  }
  int binding = -1;
  double max_usage = 0.0;
  for (int l = 0; l < L; ++l) {
    if (usage(l) > max_usage) { max_usage = usage(l); binding = l; }
  }

  PowerAllocation pa;
  pa.exponent = nu;
  const double scale = max_usage > 0.0 ? p_ap_mw / max_usage : 0.0;
  pa.rho_mw = scale * weight;
  pa.ap_usage_mw = scale * usage;
  pa.binding_ap = binding;
  return pa;
}

SeResult dl_sinr_montecarlo(const DlMoments& moments,
                            const Eigen::VectorXd& rho_mw, double noise_dl_mw,
                            double dl_fraction) {
  if (moments.trials < 10) {
    throw std::invalid_argument(
        "dl_sinr_montecarlo: needs at least 10 channel realizations");
  }
  if (!moments.finalized) {
    throw std::logic_error("dl_sinr_montecarlo: moments not finalized");
  }
  const int K = static_cast<int>(moments.norm2.size());

  SeResult res;
  res.trials = moments.trials;
  res.sinr.resize(K);
  res.se.resize(K);
  res.signal_stderr.resize(K);

  for (int k = 0; k < K; ++k) {
    const double s_k = moments.norm2(k);
    const std::complex<double> mean_sig =
        s_k > 0.0 ? moments.signal(k, k) / std::sqrt(s_k)
                  : std::complex<double>(0.0, 0.0);
    const double num = rho_mw(k) * std::norm(mean_sig);

    double rx_power = 0.0;
    for (int i = 0; i < K; ++i) {
      const double s_i = moments.norm2(i);
      if (s_i > 0.0) rx_power += rho_mw(i) * moments.power(k, i) / s_i;
    }
    double interference = rx_power - num;
    if (interference < 0.0) {
      interference = 0.0;
      ++res.clamped;
    }
    res.sinr(k) = num / (interference + noise_dl_mw);
    res.se(k) = dl_fraction * std::log2(1.0 + res.sinr(k));

    const double var =
        s_k > 0.0
            ? std::max(moments.power(k, k) / s_k - std::norm(mean_sig), 0.0)
            : 0.0;
    res.signal_stderr(k) = std::sqrt(var / moments.trials);
  }
  if (res.clamped > 0) {
    std::cerr << "[cfmimo] warning: clamped " << res.clamped
              << " negative interference terms\n";
  }
  return res;
}

std::vector<PhySchemeResult> evaluate_dl_phy(
    const ScenarioConfig& config, const LsfState& lsf,
    const PilotAssignment& pilots, const std::vector<Association>& assocs,
    std::uint64_t setup_seed, TrialDump* dump) {
  const int K = lsf.num_ues();
  const int L = lsf.num_aps();
  const int n = lsf.antennas;
  const int trials = config.num_channel_realizations;
  const double noise_mw = config.noise_power_mw();
  const Eigen::VectorXd p_mw =
      Eigen::VectorXd::Constant(K, config.ul_power_mw);

  const EstimatorContext est =
      build_estimator_context(lsf, pilots, p_mw, noise_mw);
  const ChannelSampler sampler(lsf, setup_seed);
  const std::uint64_t noise_key = derive_key(setup_seed, Sub::PilotNoise);

  const int num_schemes = static_cast<int>(assocs.size());
  std::vector<PrecoderPlan> plans;
  plans.reserve(num_schemes);
  for (const Association& a : assocs) {
    plans.push_back(build_precoder_plan(a, est, p_mw));
  }
  std::vector<DlMoments> moments(num_schemes);
  for (auto& m : moments) m.init(K, L);
  std::vector<int> fallbacks(num_schemes, 0);

  if (dump) {
    dump->signal_kk.assign(num_schemes, Eigen::MatrixXcd::Zero(trials, K));
  }

  Eigen::MatrixXcd h_stacked, y_pilot, hhat;
  std::vector<Eigen::VectorXcd> w_raw;
  for (int trial = 0; trial < trials; ++trial) {
    sampler.realization(trial, h_stacked);
    y_pilot = received_pilots(h_stacked, pilots, n, p_mw, noise_mw, noise_key,
                              trial);
    mmse_estimate_all(est, lsf, pilots, y_pilot, hhat);
    for (int s = 0; s < num_schemes; ++s) {
      pmmse_raw(plans[s], hhat, p_mw, w_raw, &fallbacks[s]);
      moments[s].accumulate(plans[s], assocs[s], h_stacked, w_raw);
      if (dump) {
        for (int k = 0; k < K; ++k) {
          dump->signal_kk[s](trial, k) =
              (Eigen::RowVectorXcd(h_stacked(plans[s].dims[k],
                                             std::vector<int>{k})
                                       .adjoint()) *
               w_raw[k])(0);
        }
      }
    }
  }

  std::vector<PhySchemeResult> results(num_schemes);
  for (int s = 0; s < num_schemes; ++s) {
    moments[s].finalize();
    const Eigen::MatrixXd e_norm = moments[s].normalized_ap_energy();
    results[s].power = fractional_power_allocation(
        assocs[s], lsf.beta_lin, e_norm, config.ap_dl_power_mw,
        config.power_exponent);
    results[s].se = dl_sinr_montecarlo(moments[s], results[s].power.rho_mw,
                                       noise_mw, config.dl_fraction());
    results[s].precoder_fallbacks = fallbacks[s];
  }
  return results;
}

}  // namespace cfmimo
