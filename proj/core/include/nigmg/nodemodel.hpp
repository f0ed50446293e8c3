#pragma once

// Closed-form conjugate computations at a single location-scale node:
// prior transition matrices, NIG marginal likelihoods and the conditional
// normal-inverse-Gamma posterior given the joint spike/slab state.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace nigmg {

/// Full hyperparameter vector. Scales decay with level as 2^(-alpha j).
struct HyperParams {
  double alpha = 0.5;
  double tau = 1.0;
  std::vector<double> upsilon;  // one per factor
  double sigma0_sq = 1.0;
  double nu = 1.0;
  double eta_rho = 0.5;
  double gamma_rho = 0.5;
  double eta_kappa = 0.5;
  double gamma_kappa = 0.5;

  /// Throws ErrorKind::domain when any constraint is violated or when
  /// upsilon does not carry exactly `factors` entries.
  void validate(std::size_t factors) const;

  // Floored at the smallest normal double: a fitted alpha can be large enough
  // to underflow, and the slab should then degrade to the spike, not to NaN.
  double tau_at(int j) const { return scaled(tau, j); }
  double upsilon_at(std::size_t l, int j) const { return scaled(upsilon[l], j); }

 private:
  double scaled(double v, int j) const {
    return std::max(std::exp2(-alpha * j) * v, std::numeric_limits<double>::min());
  }
};

struct TransitionMatrix {
  std::array<std::array<double, 2>, 2> p{};
  double operator()(int from, int to) const { return p[from][to]; }
};

/// [[max{1-eta 2^-j,0}, min{eta 2^-j,1}], [1-gamma, gamma]].
/// eta = 0 is accepted as the degenerate "never switch on" chain.
TransitionMatrix transition_matrix(int j, double eta, double gamma);

/// Root probabilities: the j = 0 row for a null parent, (1-min{eta,1}, min{eta,1}).
std::array<double, 2> initial_probabilities(double eta);

// Joint hidden state (s, r_1, ..., r_L) packed lexicographically: s is the
// most significant bit, r_L the least.
using JointState = std::uint32_t;

inline std::size_t state_count(std::size_t factors) { return std::size_t{2} << factors; }
inline bool baseline_bit(JointState x, std::size_t factors) { return (x >> factors) & 1u; }
inline bool factor_bit(JointState x, std::size_t factors, std::size_t l) {
  return (x >> (factors - 1 - l)) & 1u;
}
JointState make_state(bool s, std::span<const int> r);

/// Group labels for L factors. Labels are 0-based; level 0 is the baseline.
class FactorDesign {
 public:
  FactorDesign() = default;
  FactorDesign(std::vector<int> levels, std::vector<std::vector<int>> labels);

  /// n observations of a single function (L = 0).
  static FactorDesign replicates(std::size_t n);

  std::size_t observations() const { return n_; }
  std::size_t factors() const { return levels_.size(); }
  int levels(std::size_t l) const { return levels_[l]; }
  const std::vector<int>& labels(std::size_t l) const { return labels_[l]; }

  /// 1 + sum_l (G_l - 1): intercept followed by factor contrasts.
  std::size_t coefficient_count() const { return p_; }
  /// Column of the contrast for level g >= 1 of factor l.
  std::size_t column(std::size_t l, int g) const { return offsets_[l] + static_cast<std::size_t>(g) - 1; }

  Eigen::MatrixXd design_matrix() const;
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// X'd for one node's observation vector.
  Eigen::VectorXd cross(std::span<const double> d) const;

  /// Columns switched on by the joint state.
  std::vector<std::size_t> active_columns(JointState x) const;

 private:
  std::vector<int> levels_;
  std::vector<std::vector<int>> labels_;
  std::vector<std::size_t> offsets_;
  std::size_t n_ = 0;
  std::size_t p_ = 1;
  Eigen::MatrixXd gram_ = Eigen::MatrixXd::Zero(1, 1);
};

struct NigConditional {
  double ig_shape = 0.0;  // nu + 1 + n/2
  double ig_rate = 0.0;   // nu sigma0^2 + Upsilon
  Eigen::VectorXd mean;   // mu*, zero outside the mask
  Eigen::MatrixXd precision;  // Lambda* = X(s,r)'X(s,r) + Lambda_j
  std::vector<bool> mask;     // coefficients whose indicator is on
};

/// log m_{j,k}(s) for the single-function model from sufficient statistics.
double log_marginal_mt(double dbar, double sumsq, std::size_t n, int s, int j,
                       const HyperParams& hp);

/// log m_{j,k}(s, r) for the multi-factor model.
double log_marginal_mg(std::span<const double> d, const FactorDesign& design, JointState x,
                       int j, const HyperParams& hp);

NigConditional nig_conditional(std::span<const double> d, const FactorDesign& design,
                               JointState x, int j, const HyperParams& hp);

/// Per-node sufficient statistics: X'd, d'd.
struct NodeStats {
  Eigen::VectorXd cross;
  double sumsq = 0.0;
};

/// Caches the state- and level-dependent pieces (Cholesky of the active block
/// of Lambda*, log-determinant ratios) so that a node evaluation costs
/// O(n L + 2^(L+1) p^2).
class NodeModel {
 public:
  /// With `flat_intercept` the baseline coefficient gets a flat prior and is
  /// always in the model; states without the baseline bit must not be used.
  NodeModel(const FactorDesign& design, const HyperParams& hp, int J, bool flat_intercept = false);

  NodeStats stats(std::span<const double> d) const;
  double log_marginal(const NodeStats& st, JointState x, int j) const;
  NigConditional conditional(const NodeStats& st, JointState x, int j) const;
  /// mu* only (length p, zero outside the active set).
  Eigen::VectorXd mean(const NodeStats& st, JointState x, int j) const;

  /// Draw (sigma^2, theta) from the conditional posterior using standard
  /// normals `z` (length >= active count) and a Gamma(shape,1) variate.
  void draw(const NodeStats& st, JointState x, int j, double gamma_variate,
            std::span<const double> z, double& sigma_sq, std::span<double> theta) const;

  std::size_t factors() const { return L_; }
  std::size_t coefficient_count() const { return p_; }
  std::size_t observations() const { return n_; }
  double ig_shape() const;

 private:
  struct Block {
    std::vector<std::size_t> active;
    Eigen::LLT<Eigen::MatrixXd> chol;  // of the active block of Lambda*
    double half_log_det_ratio = 0.0;   // (log|Lambda_a| - log|Lambda*_a|)/2
  };

  const Block& block(int j, JointState x) const { return blocks_[static_cast<std::size_t>(j) * K_ + x]; }
  double upsilon_term(const NodeStats& st, const Block& b, Eigen::VectorXd* mean_active) const;

  HyperParams hp_;
  std::size_t n_ = 0;
  std::size_t L_ = 0;
  std::size_t p_ = 1;
  std::size_t K_ = 2;
  double log_const_ = 0.0;
  bool flat_intercept_ = false;
  FactorDesign design_;
  std::vector<Block> blocks_;
};

}  // namespace nigmg
