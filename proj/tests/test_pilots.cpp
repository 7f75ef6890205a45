#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cfmimo/pilots.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

namespace {

Eigen::MatrixXd random_beta(int K, int L, std::uint64_t seed) {
  Stream rng(seed);
  Eigen::MatrixXd beta(K, L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) beta(k, l) = std::pow(10.0, -10.0 + 4.0 * rng.uniform());
  }
  return beta;
}

void check_invariants(const PilotAssignment& pa, int K) {
  std::set<int> all;
  for (int t = 0; t < pa.tau_p; ++t) {
    for (int k : pa.copilots[t]) {
      CHECK(pa.pilot_of_ue[k] == t);
      CHECK(all.insert(k).second);  // disjoint
    }
  }
  CHECK(static_cast<int>(all.size()) == K);  // union covers all UEs

  // Pigeonhole lower bound on the most loaded pilot.
  std::size_t max_load = 0;
  for (const auto& s : pa.copilots) max_load = std::max(max_load, s.size());
  CHECK(max_load >= static_cast<std::size_t>((K + pa.tau_p - 1) / pa.tau_p));
}

}  // namespace

TEST_CASE("enough orthogonal pilots: all co-pilot sets are singletons") {
  const Eigen::MatrixXd beta = random_beta(5, 8, 42);
  const PilotAssignment pa = assign_pilots(beta, 10);
  check_invariants(pa, 5);
  std::set<int> used;
  for (int k = 0; k < 5; ++k) CHECK(used.insert(pa.pilot_of_ue[k]).second);
  for (const auto& s : pa.copilots) CHECK(s.size() <= 1);
}

TEST_CASE("single pilot forces sharing") {
  const Eigen::MatrixXd beta = random_beta(2, 4, 3);
  const PilotAssignment pa = assign_pilots(beta, 1);
  CHECK(pa.pilot_of_ue == std::vector<int>{0, 0});
  CHECK(pa.copilots[0] == std::vector<int>{0, 1});
}

TEST_CASE("third UE picks the least contaminated pilot at its master AP") {
  // UE 0 and UE 1 occupy pilots 0 and 1. UE 2's master AP is AP 0 where
  // beta_{0,ap} = 10 and beta_{1,ap} = 1, so pilot 1 has less contamination.
  Eigen::MatrixXd beta(3, 2);
  beta << 10.0, 0.5,   // UE 0: master AP 0
          1.0,  0.8,   // UE 1: master AP 0
          7.0,  0.1;   // UE 2: master AP 0
  const PilotAssignment pa = assign_pilots(beta, 2);
  CHECK(pa.pilot_of_ue[0] == 0);  // empty pilots preferred, lowest index
  CHECK(pa.pilot_of_ue[1] == 1);  // pilot 1 empty (contamination 0 < 10)
  CHECK(pa.pilot_of_ue[2] == 1);  // contamination 1 < 10
}

TEST_CASE("online property: adding a UE never changes existing pilots") {
  const int L = 6, tau_p = 3;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd beta = random_beta(9, L, seed);
    const PilotAssignment small = assign_pilots(beta.topRows(8), tau_p);
    const PilotAssignment big = assign_pilots(beta, tau_p);
    for (int k = 0; k < 8; ++k) {
      CHECK(small.pilot_of_ue[k] == big.pilot_of_ue[k]);
    }
    check_invariants(big, 9);
  }
}

TEST_CASE("load balance bound on random instances") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const int K = 3 + static_cast<int>(seed % 10);
    const Eigen::MatrixXd beta = random_beta(K, 5, seed);
    const PilotAssignment pa = assign_pilots(beta, 4);
    check_invariants(pa, K);
  }
}
