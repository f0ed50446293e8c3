#pragma once

// Thresholding of posterior marginal alternative probabilities: expected
// number of false positives, Bayesian FDR, and the threshold that meets a
// target FDR.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nigmg {

struct DecisionReport {
  std::size_t factor = 0;
  double delta = 0.5;
  std::vector<std::size_t> called;  // indices into the PMAP table, ascending
  double nfp = 0.0;
  double fdr = 0.0;
  std::optional<double> pjap;
};

/// Calls every entry with PMAP > delta. Empty call sets have FDR 0.
DecisionReport evaluate(std::span<const double> pmaps, double delta);

struct FdrThreshold {
  double delta = 1.0;
  bool no_calls = false;  // no nonempty call set reaches the target
  std::size_t n_called = 0;
  double fdr = 0.0;
};

/// Largest call set (in decreasing-PMAP order, ties as whole blocks) whose
/// FDR stays at or below target; delta sits just below the smallest
/// included PMAP. Without a solution, delta = max PMAP and no_calls is set.
FdrThreshold threshold_for_fdr(std::span<const double> pmaps, double target);

}  // namespace nigmg
