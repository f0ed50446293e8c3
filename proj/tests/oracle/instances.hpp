#pragma once

// Seeded random problem instances shared by the unit and acceptance tests.

#include <algorithm>
#include <random>
#include <vector>

#include "nigmg/grove.hpp"
#include "nigmg/nodemodel.hpp"
#include "nigmg/wavelet.hpp"
#include "oracle.hpp"

namespace oracle {

struct Instance {
  nigmg::WaveletData data;
  nigmg::FactorDesign design;
  nigmg::HyperParams hp;
};

/// Wavelet coefficients for n observations over levels 0..J with a sparse
/// group effect, a random L-factor design (every level present) and
/// hyperparameters drawn from a moderate range.
inline Instance random_instance(std::uint64_t seed, int J, std::size_t L, std::size_t n,
                                std::vector<int> levels) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);

  levels.resize(L, 2);
  Instance inst;
  std::vector<std::vector<int>> labels(L);
  for (std::size_t l = 0; l < L; ++l) {
    labels[l].resize(n);
    for (std::size_t i = 0; i < n; ++i) labels[l][i] = static_cast<int>(i % static_cast<std::size_t>(levels[l]));
    std::shuffle(labels[l].begin(), labels[l].end(), rng);
  }
  inst.design = L == 0 ? nigmg::FactorDesign::replicates(n)
                       : nigmg::FactorDesign(levels, labels);

  auto& hp = inst.hp;
  hp.alpha = 0.3 + 0.7 * u(rng);
  hp.tau = 0.5 + 4.0 * u(rng);
  hp.upsilon.resize(L);
  for (double& v : hp.upsilon) v = 0.5 + 3.0 * u(rng);
  hp.sigma0_sq = 0.5 + u(rng);
  hp.nu = 1.0 + 5.0 * u(rng);
  hp.eta_rho = 0.2 + 1.2 * u(rng);
  hp.gamma_rho = 0.1 + 0.8 * u(rng);
  hp.eta_kappa = 0.1 + 0.9 * u(rng);
  hp.gamma_kappa = 0.1 + 0.8 * u(rng);

  auto& d = inst.data;
  d.J = J;
  d.n = n;
  const std::size_t N = nigmg::node_count(J);
  d.mothers.resize(N * n);
  d.father.resize(n);
  std::vector<double> base(N), effect(N);
  for (std::size_t f = 0; f < N; ++f) {
    base[f] = u(rng) < 0.5 ? 2.0 * z(rng) : 0.0;
    effect[f] = u(rng) < 0.3 ? 1.5 * z(rng) : 0.0;
  }
  const double fb = z(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = L > 0 && labels[0][i] > 0 ? (labels[0][i] % 2 ? 1.0 : -1.0) : 0.0;
    for (std::size_t f = 0; f < N; ++f) d.mothers[f * n + i] = base[f] + sign * effect[f] + z(rng);
    d.father[i] = fb + z(rng);
  }
  return inst;
}

/// Node log-likelihood table [flat_node * K + state] from the dense oracle.
inline std::vector<double> node_log_likelihoods(const Instance& inst) {
  const std::size_t K = nigmg::state_count(inst.design.factors());
  const std::size_t N = nigmg::node_count(inst.data.J);
  std::vector<double> t(N * K);
  for (std::size_t f = 0; f < N; ++f) {
    const int j = nigmg::NodeIndex::from_flat(f).j;
    for (nigmg::JointState x = 0; x < K; ++x)
      t[f * K + x] = dense_log_marginal(inst.data.node(f), inst.design, x, j, inst.hp);
  }
  return t;
}

}  // namespace oracle
