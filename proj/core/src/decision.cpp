#include "nigmg/decision.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "nigmg/error.hpp"

namespace nigmg {

namespace {

void check_pmaps(std::span<const double> pmaps) {
  for (double p : pmaps)
    require(p >= 0.0 && p <= 1.0, ErrorKind::domain, "PMAP outside [0, 1]");
}

}  // namespace

DecisionReport evaluate(std::span<const double> pmaps, double delta) {
  require(delta > 0.0 && delta < 1.0, ErrorKind::domain, "threshold must lie in (0, 1)");
  check_pmaps(pmaps);
  DecisionReport r;
  r.delta = delta;
  for (std::size_t i = 0; i < pmaps.size(); ++i)
    if (pmaps[i] > delta) {
      r.called.push_back(i);
      r.nfp += 1.0 - pmaps[i];
    }
  r.fdr = r.called.empty() ? 0.0 : r.nfp / static_cast<double>(r.called.size());
  return r;
}

FdrThreshold threshold_for_fdr(std::span<const double> pmaps, double target) {
  require(target > 0.0 && target < 1.0, ErrorKind::domain, "target FDR must lie in (0, 1)");
  check_pmaps(pmaps);
  std::vector<double> sorted(pmaps.begin(), pmaps.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  FdrThreshold out;
  out.no_calls = true;
  out.delta = sorted.empty() ? 1.0 : sorted.front();
  double nfp = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t end = i;
    double block = 0.0;
    while (end < sorted.size() && sorted[end] == sorted[i]) block += 1.0 - sorted[end++];
    const double fdr = (nfp + block) / static_cast<double>(end);
    // a block at PMAP 0 can never be called by a strict threshold
    if (fdr > target || sorted[i] <= 0.0) break;
    nfp += block;
    i = end;
    out.no_calls = false;
    out.n_called = end;
    out.fdr = fdr;
    out.delta = std::nextafter(sorted[i - 1], 0.0);
  }
  if (out.no_calls) out.delta = std::max(out.delta, std::nextafter(0.0, 1.0));
  return out;
}

}  // namespace nigmg
