#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cfmimo/phy.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

namespace {

PilotAssignment pilots_for(std::vector<int> pilot_of_ue, int tau_p) {
  PilotAssignment pa;
  pa.tau_p = tau_p;
  pa.pilot_of_ue = std::move(pilot_of_ue);
  pa.copilots.assign(tau_p, {});
  for (int k = 0; k < static_cast<int>(pa.pilot_of_ue.size()); ++k) {
    pa.copilots[pa.pilot_of_ue[k]].push_back(k);
  }
  return pa;
}

LsfState uniform_lsf(int K, int L, int N, double beta) {
  LsfState lsf;
  lsf.antennas = N;
  lsf.beta_lin.setConstant(K, L, beta);
  lsf.beta_db.setConstant(K, L, 10.0 * std::log10(beta));
  lsf.dist_km.setConstant(K, L, 0.1);
  return lsf;
}

Association single_ue_single_ap() {
  Association assoc;
  AssociationEntry e;
  e.serving_aps = {0};
  e.serving_cpus = {0};
  e.master_cpu = 0;
  assoc.entries = {e};
  return assoc;
}

// Minimal plan with perfect-CSI regularization (sigma^2 I only).
PrecoderPlan perfect_csi_plan(int K, int N, double noise_mw,
                              const std::vector<std::vector<int>>& serving_aps) {
  PrecoderPlan plan;
  plan.antennas = N;
  plan.dims.resize(K);
  plan.partial.resize(K);
  plan.reg_blocks.resize(K);
  for (int k = 0; k < K; ++k) {
    for (int ap : serving_aps[k]) {
      for (int a = 0; a < N; ++a) plan.dims[k].push_back(ap * N + a);
    }
    for (int i = 0; i < K; ++i) {
      for (int ap_i : serving_aps[i]) {
        if (std::find(serving_aps[k].begin(), serving_aps[k].end(), ap_i) !=
            serving_aps[k].end()) {
          plan.partial[k].push_back(i);
          break;
        }
      }
    }
    for (std::size_t j = 0; j < serving_aps[k].size(); ++j) {
      plan.reg_blocks[k].push_back(noise_mw *
                                   Eigen::MatrixXcd::Identity(N, N));
    }
  }
  return plan;
}

}  // namespace

TEST_CASE("received pilots: unused pilot carries noise only") {
  const int N = 2, L = 2;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Constant(N * L, 1, 1.0);
  const PilotAssignment pa = pilots_for({0}, 2);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 4.0);

  // zero noise: pilot 1 must be exactly zero, pilot 0 carries the UE
  const Eigen::MatrixXcd y = received_pilots(h, pa, N, p, 0.0, 1, 0);
  REQUIRE(y.cols() == 2 * L);
  CHECK(y.col(2).norm() == 0.0);  // (t=1, l=0)
  CHECK(y.col(3).norm() == 0.0);
  const double scale = std::sqrt(2.0 * 4.0);  // sqrt(tau_p * p)
  CHECK(y.col(0).isApprox(scale * h.block(0, 0, N, 1)));
  CHECK(y.col(1).isApprox(scale * h.block(N, 0, N, 1)));
}

TEST_CASE("received pilots: co-pilot power adds") {
  const int N = 2, L = 1, trials = 20000;
  const double beta1 = 2.0, beta2 = 0.5, p = 3.0, noise = 0.7;
  const int tau_p = 2;
  const PilotAssignment pa = pilots_for({0, 0}, tau_p);
  const Eigen::VectorXd power = Eigen::VectorXd::Constant(2, p);

  LsfState lsf = uniform_lsf(2, 1, N, 1.0);
  lsf.beta_lin(0, 0) = beta1;
  lsf.beta_lin(1, 0) = beta2;
  ChannelSampler sampler(lsf, 11);

  double energy = 0.0;
  Eigen::MatrixXcd h;
  for (int t = 0; t < trials; ++t) {
    sampler.realization(t, h);
    const Eigen::MatrixXcd y = received_pilots(h, pa, N, power, noise, 5, t);
    energy += y.col(0).squaredNorm() / trials;
  }
  const double expected = tau_p * p * (beta1 + beta2) * N + noise * N;
  CHECK(energy == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("mmse estimate: scalar case halves the observation") {
  // N=1, beta=1, tau_p p = 1, sigma^2 = 1: h_hat = y / 2.
  Eigen::MatrixXcd r(1, 1), psi(1, 1);
  r << 1.0;
  psi << 2.0;
  Eigen::VectorXcd y(1);
  y << std::complex<double>(0.6, -0.8);
  const Eigen::VectorXcd hhat = mmse_estimate(r, psi, y, 1.0);
  CHECK(hhat(0).real() == doctest::Approx(0.3));
  CHECK(hhat(0).imag() == doctest::Approx(-0.4));
}

TEST_CASE("mmse estimate: zero correlation gives zero estimate") {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(2, 2);
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::VectorXcd y(2);
  y << 1.0, 2.0;
  CHECK(mmse_estimate(r, psi, y, 3.0).norm() == 0.0);
}

TEST_CASE("mmse estimate approaches the channel as noise vanishes") {
  const int N = 3;
  Stream rng(21);
  Eigen::MatrixXcd a(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) a(i, j) = rng.cgauss();
  const Eigen::MatrixXcd r = a * a.adjoint() + Eigen::MatrixXcd::Identity(N, N);

  Eigen::VectorXcd h(N);
  for (int i = 0; i < N; ++i) h(i) = rng.cgauss();
  const double tp_p = 9.0;
  const Eigen::VectorXcd y = std::sqrt(tp_p) * h;  // noiseless observation
  const Eigen::MatrixXcd psi =
      tp_p * r + 1e-12 * Eigen::MatrixXcd::Identity(N, N);
  const Eigen::VectorXcd hhat = mmse_estimate(r, psi, y, std::sqrt(tp_p));
  CHECK((hhat - h).norm() < 1e-9 * h.norm());
}

TEST_CASE("estimator context: orthogonality and error covariance") {
  // Two co-pilot UEs, N=2, moderate SNR; checks E{hhat err^H} ~ 0 and
  // E{err err^H} ~ C_kl within 3-sigma Monte Carlo bands.
  const int N = 2, L = 1, K = 2, trials = 20000;
  LsfState lsf = uniform_lsf(K, L, N, 1.0);
  lsf.beta_lin(1, 0) = 0.5;
  const PilotAssignment pa = pilots_for({0, 0}, 1);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(K, 2.0);
  const double noise = 0.5;

  const EstimatorContext est = build_estimator_context(lsf, pa, p, noise);
  ChannelSampler sampler(lsf, 31);
  const std::uint64_t noise_key = derive_key(31ULL, Sub::PilotNoise);

  Eigen::MatrixXcd h, hhat;
  Eigen::Matrix2cd cross = Eigen::Matrix2cd::Zero();
  Eigen::Matrix2cd err_cov = Eigen::Matrix2cd::Zero();
  Eigen::Vector2cd mean_hhat = Eigen::Vector2cd::Zero();
  for (int t = 0; t < trials; ++t) {
    sampler.realization(t, h);
    const Eigen::MatrixXcd y = received_pilots(h, pa, N, p, noise, noise_key, t);
    mmse_estimate_all(est, lsf, pa, y, hhat);
    const Eigen::Vector2cd e = h.col(0) - hhat.col(0);
    cross += hhat.col(0) * e.adjoint() / trials;
    err_cov += e * e.adjoint() / trials;
    mean_hhat += hhat.col(0) / trials;
  }
  // scale of a single-entry MC std: ~beta/sqrt(trials) ~ 0.007
  const double band = 3.0 * 1.0 / std::sqrt(double(trials));
  CHECK(cross.norm() < 2.0 * band);  // 4 entries, allow the norm some slack
  CHECK(mean_hhat.norm() < band);
  const Eigen::MatrixXcd expected_c = est.err_cov[0];
  CHECK((err_cov - expected_c).norm() < 4.0 * band);
}

TEST_CASE("pilot contamination degrades estimation monotonically") {
  Stream rng(63);
  for (int rep = 0; rep < 20; ++rep) {
    const int N = 3;
    auto random_psd = [&](double scale) {
      Eigen::MatrixXcd a(N, N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) a(i, j) = rng.cgauss();
      return Eigen::MatrixXcd(scale * (a * a.adjoint()));
    };
    const Eigen::MatrixXcd r = random_psd(1.0);
    const Eigen::MatrixXcd extra = random_psd(0.5);
    const Eigen::MatrixXcd psi1 =
        2.0 * r + Eigen::MatrixXcd::Identity(N, N);
    const Eigen::MatrixXcd psi2 = psi1 + 2.0 * extra;

    CHECK(psi2.trace().real() >= psi1.trace().real());
    const double q1 = (r * psi1.llt().solve(r)).trace().real();
    const double q2 = (r * psi2.llt().solve(r)).trace().real();
    CHECK(q2 <= q1 + 1e-9);
  }
}

TEST_CASE("p-mmse: single UE single antenna reduces to a matched filter") {
  const int trials = 200;
  const double noise = 0.3;
  const PrecoderPlan plan = perfect_csi_plan(1, 1, noise, {{0}});
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 2.0);

  Stream rng(5);
  std::vector<std::vector<Eigen::VectorXcd>> raw(trials);
  std::vector<Eigen::VectorXcd> w;
  std::vector<std::complex<double>> hs(trials);
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = rng.cgauss();
    hs[t] = h(0, 0);
    pmmse_raw(plan, h, p, w);
    raw[t] = w;
  }
  const auto norm = normalize_precoders(raw);
  double mean_norm2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    // direction matches h exactly
    const std::complex<double> ratio = norm[t][0](0) / hs[t];
    CHECK(std::abs(ratio.imag()) < 1e-12 * std::abs(ratio.real()));
    CHECK(ratio.real() > 0.0);
    mean_norm2 += norm[t][0].squaredNorm() / trials;
  }
  CHECK(mean_norm2 > 0.99);
  CHECK(mean_norm2 < 1.01);
}

TEST_CASE("p-mmse: orthogonal channels give orthogonal precoders") {
  const double noise = 1e-3;
  const PrecoderPlan plan = perfect_csi_plan(2, 2, noise, {{0}, {0}});
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(2, 1.0);

  Eigen::MatrixXcd h(2, 2);
  h.col(0) << std::complex<double>(1.0, 0.5), std::complex<double>(-0.5, 1.0);
  h.col(1) << -std::conj(h(1, 0)), std::conj(h(0, 0));
  REQUIRE(std::abs(h.col(0).dot(h.col(1))) < 1e-12);

  std::vector<Eigen::VectorXcd> w;
  pmmse_raw(plan, h, p, w);
  const double align0 = std::abs(h.col(0).dot(w[0])) /
                        (h.col(0).norm() * w[0].norm());
  const double align1 = std::abs(h.col(1).dot(w[1])) /
                        (h.col(1).norm() * w[1].norm());
  CHECK(align0 > 1.0 - 1e-9);
  CHECK(align1 > 1.0 - 1e-9);
}

TEST_CASE("p-mmse: zero estimate falls back to the uniform precoder") {
  const PrecoderPlan plan = perfect_csi_plan(1, 2, 0.5, {{0, 1}});
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 1);
  std::vector<Eigen::VectorXcd> w;
  int fallbacks = 0;
  pmmse_raw(plan, h, p, w, &fallbacks);
  CHECK(fallbacks == 1);
  CHECK(w[0].squaredNorm() == doctest::Approx(1.0));
  CHECK(std::abs(w[0](0)) == doctest::Approx(std::abs(w[0](3))));
}

TEST_CASE("fractional power allocation") {
  SUBCASE("one UE on one AP gets the full budget") {
    const Association assoc = single_ue_single_ap();
    Eigen::MatrixXd beta(1, 1), e_norm(1, 1);
    beta << 1e-8;
    e_norm << 1.0;
    const PowerAllocation pa =
        fractional_power_allocation(assoc, beta, e_norm, 200.0, -0.5);
    CHECK(pa.rho_mw(0) == doctest::Approx(200.0));
    CHECK(pa.binding_ap == 0);
  }
  SUBCASE("two identical UEs split the shared AP budget") {
    Association assoc;
    AssociationEntry e;
    e.serving_aps = {0};
    e.serving_cpus = {0};
    e.master_cpu = 0;
    assoc.entries = {e, e};
    Eigen::MatrixXd beta(2, 1), e_norm(2, 1);
    beta << 2e-9, 2e-9;
    e_norm << 1.0, 1.0;
    const PowerAllocation pa =
        fractional_power_allocation(assoc, beta, e_norm, 200.0, -0.5);
    CHECK(pa.rho_mw(0) == doctest::Approx(100.0));
    CHECK(pa.rho_mw(1) == doctest::Approx(100.0));
    CHECK(pa.ap_usage_mw(0) == doctest::Approx(200.0));
  }
  SUBCASE("nu=0 ignores channel strength") {
    Association assoc;
    AssociationEntry e0, e1;
    e0.serving_aps = {0};
    e0.serving_cpus = {0};
    e0.master_cpu = 0;
    e1.serving_aps = {1};
    e1.serving_cpus = {0};
    e1.master_cpu = 0;
    assoc.entries = {e0, e1};
    Eigen::MatrixXd beta(2, 2), e_norm(2, 2);
    beta << 1e-9, 0.0, 0.0, 4e-9;
    e_norm << 1.0, 0.0, 0.0, 1.0;
    const PowerAllocation equal =
        fractional_power_allocation(assoc, beta, e_norm, 100.0, 0.0);
    CHECK(equal.rho_mw(0) == doctest::Approx(equal.rho_mw(1)));
    const PowerAllocation frac =
        fractional_power_allocation(assoc, beta, e_norm, 100.0, -0.5);
    CHECK(frac.rho_mw(0) == doctest::Approx(2.0 * frac.rho_mw(1)));
  }
}

TEST_CASE("dl sinr: arithmetic and guards") {
  DlMoments m;
  m.init(1, 1);
  m.trials = 100;
  m.finalized = true;
  m.signal(0, 0) = 1.0;
  m.power(0, 0) = 1.5;
  m.norm2(0) = 1.0;
  const Eigen::VectorXd rho = Eigen::VectorXd::Ones(1);

  SUBCASE("sinr of one gives se 0.95 at the 190/200 split") {
    const SeResult r = dl_sinr_montecarlo(m, rho, 0.5, 190.0 / 200.0);
    CHECK(r.sinr(0) == doctest::Approx(1.0));
    CHECK(r.se(0) == doctest::Approx(0.95));
  }
  SUBCASE("overwhelming noise drives se to zero") {
    const SeResult r = dl_sinr_montecarlo(m, rho, 1e12, 0.95);
    CHECK(r.sinr(0) < 1e-10);
    CHECK(r.se(0) < 1e-9);
  }
  SUBCASE("fewer than 10 trials is refused") {
    DlMoments few;
    few.init(1, 1);
    few.trials = 9;
    few.finalized = true;
    CHECK_THROWS_AS(dl_sinr_montecarlo(few, rho, 0.5, 0.95),
                    std::invalid_argument);
  }
}

TEST_CASE("dl sinr matches the closed-form Rayleigh matched-filter value") {
  // K=L=N=1, perfect CSI, per-trial unit-norm precoder w = h/|h|:
  // sinr = rho beta (pi/4) / (rho beta (1 - pi/4) + sigma^2).
  const int trials = 100000;
  const double beta = 2.0, rho_v = 1.5, noise = 0.8;

  PrecoderPlan plan = perfect_csi_plan(1, 1, noise, {{0}});
  Association assoc = single_ue_single_ap();
  DlMoments m;
  m.init(1, 1);
  Stream rng(777);
  Eigen::MatrixXcd h(1, 1);
  std::vector<Eigen::VectorXcd> w(1);
  for (int t = 0; t < trials; ++t) {
    h(0, 0) = std::sqrt(beta) * rng.cgauss();
    w[0] = Eigen::VectorXcd::Constant(1, h(0, 0) / std::abs(h(0, 0)));
    m.accumulate(plan, assoc, h, w);
  }
  m.finalize();
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(1, rho_v);
  const SeResult r = dl_sinr_montecarlo(m, rho, noise, 0.95);

  const double pi4 = std::numbers::pi / 4.0;
  const double expected = rho_v * beta * pi4 /
                          (rho_v * beta * (1.0 - pi4) + noise);
  CHECK(r.sinr(0) == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("doubling trials halves the variance of moment estimates") {
  // Batch-mean variance of the effective signal scales as 1/trials.
  Stream rng(4242);
  const int batches = 200;
  auto batch_variance = [&](int trials) {
    double mean = 0.0, m2 = 0.0;
    std::vector<double> means(batches);
    for (int b = 0; b < batches; ++b) {
      double acc = 0.0;
      for (int t = 0; t < trials; ++t) acc += std::abs(rng.cgauss());
      means[b] = acc / trials;
    }
    for (double v : means) mean += v / batches;
    for (double v : means) m2 += (v - mean) * (v - mean) / (batches - 1);
    return m2;
  };
  const double v1 = batch_variance(100);
  const double v2 = batch_variance(200);
  CHECK(v1 / v2 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("end-to-end phy evaluation is deterministic and sane") {
  ScenarioConfig cfg;
  cfg.num_ues = 3;
  cfg.num_aps = 6;
  cfg.num_cpus = 2;
  cfg.antennas_per_ap = 2;
  cfg.area_side_m = 600.0;
  cfg.num_channel_realizations = 60;
  const Topology topo = generate_topology(cfg, 9);
  const LsfState lsf = compute_lsf_state(cfg, topo, 9);
  const PilotAssignment pilots = assign_pilots(lsf.beta_lin, cfg.tau_p);
  const Association assoc = associate_all(Scheme::HybridUA, lsf.beta_lin,
                                          pilots, topo, cfg);

  const auto a = evaluate_dl_phy(cfg, lsf, pilots, {assoc}, 9);
  const auto b = evaluate_dl_phy(cfg, lsf, pilots, {assoc}, 9);
  REQUIRE(a.size() == 1);
  CHECK(a[0].se.se == b[0].se.se);
  for (int k = 0; k < 3; ++k) {
    CHECK(a[0].se.sinr(k) >= 0.0);
    CHECK(a[0].se.se(k) > 0.0);
  }
  // per-AP feasibility with binding equality
  const PowerAllocation& pa = a[0].power;
  double max_usage = 0.0;
  for (int l = 0; l < cfg.num_aps; ++l) {
    CHECK(pa.ap_usage_mw(l) <= cfg.ap_dl_power_mw * (1.0 + 1e-9));
    max_usage = std::max(max_usage, pa.ap_usage_mw(l));
  }
  CHECK(max_usage == doctest::Approx(cfg.ap_dl_power_mw).epsilon(1e-9));
}
