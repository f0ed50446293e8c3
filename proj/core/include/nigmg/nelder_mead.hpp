#pragma once

// Derivative-free simplex minimization (reflection / expansion /
// contraction / shrink) with the relative stopping rule used by R's optim.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nigmg {

struct NelderMeadOptions {
  std::size_t max_iters = 2000;
  double reltol = 1e-8;
  double step = 0.5;  // initial simplex edge along each axis
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Minimizes f from x0. Non-finite objective values are treated as +inf so
/// the simplex backs away from them.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace nigmg
