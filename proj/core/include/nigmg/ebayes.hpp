#pragma once

// Hyperparameter selection: maximum marginal likelihood over the
// unconstrained (log / logit) parameterization, and elicitation of the
// factor-tree sparsity from the prior joint alternative probability.

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "nigmg/nodemodel.hpp"
#include "nigmg/wavelet.hpp"

namespace nigmg {

enum class FitMode { full_eb, hybrid, fixed };

FitMode parse_fit_mode(std::string_view s);
std::string_view to_string(FitMode m);

struct FitSpec {
  FitMode mode = FitMode::full_eb;
  std::optional<std::pair<double, double>> fixed_sparsity;  // (eta_kappa, gamma_kappa)
  bool fit_alpha = true;  // when false alpha stays at its initial value
  std::size_t max_iters = 2000;
  double tolerance = 1e-8;
  std::size_t restarts = 3;
  double jitter = 0.5;  // sd of restart perturbations in transformed space
  std::uint64_t seed = 1;

  void validate() const;
};

struct FitResult {
  HyperParams hp;
  double log_marginal = 0.0;
  double initial_log_marginal = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;  // of the winning restart
  std::size_t best_restart = 0;
  bool converged = false;
};

/// log P(D | hp): the evidence of the bottom-up pass.
double log_marginal(const HyperParams& hp, const WaveletData& data, const FactorDesign& design);

/// Data-driven starting point: sigma0^2 from the MAD of the finest-level
/// coefficients, tau and upsilon from the coarse-level energy.
HyperParams default_hyperparams(const WaveletData& data, const FactorDesign& design);

/// Maximizes the evidence. In hybrid mode the factor-tree sparsity is pinned
/// to spec.fixed_sparsity; in fixed mode `init` is returned unchanged.
FitResult mmle_fit(const WaveletData& data, const FactorDesign& design, const FitSpec& spec,
                   const HyperParams& init);

/// Prior probability that a factor's indicator chain is on somewhere in
/// the tree. Only the all-null path matters, so gamma and L drop out; they
/// are validated and kept for interface symmetry.
double prior_pjap(double eta, double gamma, int J, std::size_t factors);

/// eta such that prior_pjap(eta, gamma, J, L) = target within 1e-6.
/// Throws ErrorKind::range when target is outside (0, 1).
double calibrate_sparsity(double target, double gamma, int J, std::size_t factors);

}  // namespace nigmg
