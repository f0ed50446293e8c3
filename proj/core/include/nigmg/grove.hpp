#pragma once

// Exact inference on the Markov grove: bottom-up phi/xi recursion,
// top-down posterior marginals, joint-null probabilities, ancestral
// posterior sampling and credible bands.
//
// All phi/xi values are kept as logarithms. Tables are indexed
// [flat_node * state_count + joint_state].

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nigmg/nodemodel.hpp"
#include "nigmg/wavelet.hpp"

namespace nigmg {

/// Prior transitions of the L+1 independent chains, applied to joint-state
/// vectors one bit at a time (the joint matrix is a Kronecker product).
class PriorChains {
 public:
  PriorChains(const HyperParams& hp, std::size_t factors, int J);

  std::size_t factors() const { return L_; }
  std::size_t states() const { return K_; }

  /// log P(child = b | parent = a) at level j; at j = 0 the parent is the
  /// fictitious all-null state, which yields the initial probabilities.
  double log_transition(int j, JointState a, JointState b) const;
  double log_initial(JointState b) const { return log_transition(0, 0, b); }
  /// Root log probability of the factor bits of b alone (baseline bit ignored).
  double log_initial_factors(JointState b) const;

  /// out[a] = log sum_b P_j(a,b) exp(v[b]), in place.
  void apply(int j, std::span<double> v) const;
  /// out[b] = log sum_a P_j(a,b) exp(v[a]), in place.
  void apply_transposed(int j, std::span<double> v) const;

 private:
  // log 2x2 matrix of the chain stored at state bit q (bit L is the baseline)
  const std::array<std::array<double, 2>, 2>& log_matrix(int j, std::size_t bit) const;

  std::size_t L_;
  std::size_t K_;
  std::vector<std::array<std::array<double, 2>, 2>> log_rho_;    // per level
  std::vector<std::array<std::array<double, 2>, 2>> log_kappa_;  // per level
};

class PosteriorGrove {
 public:
  int levels() const { return J_; }
  std::size_t factors() const { return L_; }
  std::size_t states() const { return K_; }
  std::size_t nodes() const { return node_count(J_); }

  /// log xi_{0,0}: marginal likelihood of all mother coefficients.
  double log_evidence() const { return log_evidence_; }

  double log_phi(NodeIndex n, JointState x) const { return log_phi_[n.flat() * K_ + x]; }
  /// For the root the value does not depend on `parent`.
  double log_xi(NodeIndex n, JointState parent) const { return log_xi_[n.flat() * K_ + parent]; }
  std::span<const double> log_phi_table() const { return log_phi_; }

  /// P(child state | parent state, data) for a node with j >= 1.
  double posterior_transition(NodeIndex child, JointState parent, JointState state) const;
  std::vector<double> posterior_transition_row(NodeIndex child, JointState parent) const;
  std::vector<double> root_distribution() const;

  bool has_data() const { return has_data_; }
  const HyperParams& hyperparams() const { return hp_; }
  const PriorChains& prior() const { return prior_; }
  const NodeModel& model() const;
  const NodeStats& node_stats(NodeIndex n) const;

  /// Conditional NIG posterior of a node given its joint state.
  NigConditional conditional(NodeIndex n, JointState x) const;

  /// The father coefficient is a standalone node. Its intercept has a flat
  /// prior and is never shrunk; its factor contrasts follow the root prior.
  /// States without the baseline bit have probability 0. It is not part of
  /// the tree evidence.
  std::span<const double> father_distribution() const { return father_dist_; }
  NigConditional father_conditional(JointState x) const;
  const NodeStats& father_stats() const { return father_stats_; }
  const NodeModel& father_model() const;

  friend PosteriorGrove upward_pass(const WaveletData& data, const FactorDesign& design,
                                    const HyperParams& hp);
  friend PosteriorGrove upward_pass_loglik(int J, std::size_t factors, const HyperParams& hp,
                                           std::vector<double> log_m);

 private:
  PosteriorGrove(int J, std::size_t L, const HyperParams& hp);
  void run(std::vector<double> log_m);

  int J_ = 0;
  std::size_t L_ = 0;
  std::size_t K_ = 2;
  HyperParams hp_;
  PriorChains prior_;
  std::vector<double> log_phi_;
  std::vector<double> log_xi_;
  double log_evidence_ = 0.0;

  bool has_data_ = false;
  std::optional<NodeModel> model_;
  std::optional<NodeModel> father_model_;
  std::vector<NodeStats> stats_;
  NodeStats father_stats_;
  std::vector<double> father_dist_;
};

/// Builds node likelihoods from wavelet data and runs the bottom-up pass.
PosteriorGrove upward_pass(const WaveletData& data, const FactorDesign& design,
                           const HyperParams& hp);

/// Bottom-up pass from an explicit table of node log-likelihoods
/// (nodes x states). Only the sparsity part of `hp` is used. Running it with
/// a constant table gives the prior model.
PosteriorGrove upward_pass_loglik(int J, std::size_t factors, const HyperParams& hp,
                                  std::vector<double> log_m);

class PosteriorMarginals {
 public:
  PosteriorMarginals(int J, std::size_t factors, std::vector<double> probs)
      : J_(J), L_(factors), K_(state_count(factors)), probs_(std::move(probs)) {}

  double state(NodeIndex n, JointState x) const { return probs_[n.flat() * K_ + x]; }
  std::span<const double> table() const { return probs_; }

  /// P(R_l = 1 | data) at node n.
  double pmap(NodeIndex n, std::size_t factor) const;
  /// P(S = 1 | data) at node n.
  double baseline(NodeIndex n) const;

  /// Flat (heap-ordered) tables over all mother nodes.
  std::vector<double> pmap_table(std::size_t factor) const;
  std::vector<double> baseline_table() const;

 private:
  int J_;
  std::size_t L_;
  std::size_t K_;
  std::vector<double> probs_;
};

PosteriorMarginals downward_marginals(const PosteriorGrove& g);

/// Posterior joint alternative probability 1 - P(R_l = 0 on every node | data).
double pjap(const PosteriorGrove& g, std::size_t factor);
/// log P(R_l = 0 on every node | data), accurate when PJAP is close to 1.
double log_pjnp(const PosteriorGrove& g, std::size_t factor);

struct PosteriorDraw {
  std::size_t coefficients = 0;  // p
  std::vector<JointState> states;
  std::vector<double> sigma_sq;
  std::vector<double> coeffs;  // [flat_node * p + c]
  JointState father_state = 0;
  double father_sigma_sq = 0.0;
  std::vector<double> father_coeffs;

  std::span<const double> node(std::size_t flat) const {
    return {coeffs.data() + flat * coefficients, coefficients};
  }
};

/// i.i.d. draws from the joint posterior. Draw i uses its own random stream
/// derived from (seed, i), so results do not depend on threading.
std::vector<PosteriorDraw> sample_posterior(const PosteriorGrove& g, std::size_t n_draws,
                                            std::uint64_t seed);

/// Linear functional of the coefficient vector (z, beta...) at every node.
struct Contrast {
  std::string label;
  std::vector<double> weights;  // length p
};

Contrast baseline_contrast(const FactorDesign& design);
/// f_l^(a) - f_l^(b) for two levels of factor l (level 0 is the baseline).
Contrast level_contrast(const FactorDesign& design, std::size_t factor, int a, int b);

/// E(contrast coefficients | data), sum over joint states of P(state) mu*(state).
CoefficientTree posterior_mean(const PosteriorGrove& g, const PosteriorMarginals& m,
                               const Contrast& c, bool include_father);
/// E(z | data) including the father coefficient.
CoefficientTree posterior_mean_z(const PosteriorGrove& g, const PosteriorMarginals& m);

/// Curve of one draw for a contrast: inverse DWT of the contrast coefficients.
std::vector<double> draw_curve(const PosteriorDraw& d, const Contrast& c, bool include_father,
                               int J, const WaveletFilter& filter);

struct CredibleBand {
  double level = 0.95;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> mean;  // pointwise sample mean
};

/// Pointwise quantile band at (1 -/+ level)/2 from a set of curves.
CredibleBand credible_band(std::span<const std::vector<double>> curves, double level);
CredibleBand credible_bands(std::span<const PosteriorDraw> draws, const Contrast& c,
                            double level, bool include_father, int J,
                            const WaveletFilter& filter);

}  // namespace nigmg
