#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfmimo/association.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/pilots.hpp"

namespace cfmimo {

// Pilot-phase observation for one coherence block. Column t*L + l holds
// y_{t,l} = sum_{i on pilot t} sqrt(tau_p p_i) h_il + noise.
Eigen::MatrixXcd received_pilots(const Eigen::MatrixXcd& h_stacked,
                                 const PilotAssignment& pilots, int antennas,
                                 const Eigen::VectorXd& ul_power_mw,
                                 double noise_mw, std::uint64_t noise_key,
                                 int trial);

// Trial-independent estimation state: factorized pilot covariances Psi_{t,l}
// and MMSE error covariances C_kl = R - tau_p p R Psi^-1 R.
struct EstimatorContext {
  int antennas = 1, num_aps = 0, num_ues = 0, tau_p = 0;
  double noise_mw = 0.0;
  Eigen::VectorXd sqrt_tp_p;  // per UE sqrt(tau_p * p_k)
  std::vector<Eigen::LLT<Eigen::MatrixXcd>> psi_llt;  // t * L + l
  std::vector<Eigen::MatrixXcd> err_cov;              // k * L + l
  double max_psi_condition = 0.0;  // warned above 1e12
};

EstimatorContext build_estimator_context(const LsfState& lsf,
                                         const PilotAssignment& pilots,
                                         const Eigen::VectorXd& ul_power_mw,
                                         double noise_mw);

// Single-pair MMSE estimate (test-facing): sqrt_tp_p * R * Psi^-1 * y.
Eigen::VectorXcd mmse_estimate(const Eigen::MatrixXcd& corr,
                               const Eigen::MatrixXcd& psi,
                               const Eigen::VectorXcd& y_pilot,
                               double sqrt_tp_p);

// Estimates for every (UE, AP) pair of one trial; hhat is N*L x K.
void mmse_estimate_all(const EstimatorContext& est, const LsfState& lsf,
                       const PilotAssignment& pilots,
                       const Eigen::MatrixXcd& y_pilot,
                       Eigen::MatrixXcd& hhat);

// Static per-association precoding structure: stacked dimension lists for
// each serving set and the partial UE sets S_k reached through shared APs.
struct PrecoderPlan {
  int antennas = 1;
  std::vector<std::vector<int>> dims;     // per UE: global dims l*N + a
  std::vector<std::vector<int>> partial;  // per UE: S_k, sorted
  // Per UE, per serving AP: sum_{i in S_k} p_i C_il + sigma^2 I.
  std::vector<std::vector<Eigen::MatrixXcd>> reg_blocks;
};

PrecoderPlan build_precoder_plan(const Association& assoc,
                                 const EstimatorContext& est,
                                 const Eigen::VectorXd& ul_power_mw);

// Unnormalized P-MMSE precoders for one trial, each on its own serving
// dimensions. A UE whose estimate is exactly zero gets the uniform fallback
// vector; fallback_count (if given) is incremented per occurrence.
void pmmse_raw(const PrecoderPlan& plan, const Eigen::MatrixXcd& hhat,
               const Eigen::VectorXd& ul_power_mw,
               std::vector<Eigen::VectorXcd>& w_raw,
               int* fallback_count = nullptr);

// Batch normalization so that the sample mean of ||w_k||^2 is one.
std::vector<std::vector<Eigen::VectorXcd>> normalize_precoders(
    const std::vector<std::vector<Eigen::VectorXcd>>& raw_per_trial);

// Running sums of the hardening-bound moments over trials. Normalization by
// sqrt(mean ||w||^2) is applied after the fact: every reported moment is a
// fixed per-UE rescaling of the raw sums.
struct DlMoments {
  Eigen::MatrixXcd signal;   // K x K, row k col i: mean h_k^H D_i w_i
  Eigen::MatrixXd power;     // K x K, mean |h_k^H D_i w_i|^2
  Eigen::VectorXd norm2;     // K, mean ||w_i||^2
  Eigen::MatrixXd ap_norm2;  // K x L, mean ||w_{il}||^2
  int trials = 0;
  bool finalized = false;

  void init(int num_ues, int num_aps);
  void accumulate(const PrecoderPlan& plan, const Association& assoc,
                  const Eigen::MatrixXcd& h_stacked,
                  const std::vector<Eigen::VectorXcd>& w_raw);
  void finalize();

  // E{||(D_i w-bar_i)_l||^2} for the batch-normalized precoder.
  Eigen::MatrixXd normalized_ap_energy() const;
};

struct PowerAllocation {
  Eigen::VectorXd rho_mw;       // K
  Eigen::VectorXd ap_usage_mw;  // L, expected radiated power
  int binding_ap = -1;
  double exponent = 0.0;
};

// Fractional allocation rho_k = c * (sum_l beta_kl)^nu with the largest c
// keeping every AP within its budget; equality at the binding AP.
PowerAllocation fractional_power_allocation(const Association& assoc,
                                            const Eigen::MatrixXd& beta_lin,
                                            const Eigen::MatrixXd& e_norm,
                                            double p_ap_mw, double nu);

struct SeResult {
  Eigen::VectorXd sinr;           // K, linear
  Eigen::VectorXd se;             // K, bit/s/Hz
  Eigen::VectorXd signal_stderr;  // K, std error of the hardening numerator
  int trials = 0;
  int clamped = 0;  // negative interference terms clamped at zero
};

// Hardening-bound DL SINR/SE from finalized moments. Refuses trials < 10.
SeResult dl_sinr_montecarlo(const DlMoments& moments,
                            const Eigen::VectorXd& rho_mw, double noise_dl_mw,
                            double dl_fraction);

// Full per-setup DL evaluation for several associations sharing one set of
// channel realizations.
struct PhySchemeResult {
  SeResult se;
  PowerAllocation power;
  int precoder_fallbacks = 0;
};

struct TrialDump {
  // Per scheme: trials x K raw effective signal h_k^H D_k w_k.
  std::vector<Eigen::MatrixXcd> signal_kk;
};

std::vector<PhySchemeResult> evaluate_dl_phy(
    const ScenarioConfig& config, const LsfState& lsf,
    const PilotAssignment& pilots, const std::vector<Association>& assocs,
    std::uint64_t setup_seed, TrialDump* dump = nullptr);

}  // namespace cfmimo
