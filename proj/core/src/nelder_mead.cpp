#include "nigmg/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nigmg/error.hpp"

namespace nigmg {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  require(!x0.empty(), ErrorKind::domain, "nothing to optimize");
  require(opts.reltol > 0.0, ErrorKind::domain, "tolerance must be > 0");
  const std::size_t d = x0.size();
  NelderMeadResult res;

  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += opts.step;
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(pts[i]);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), trial(d), trial2(d);
  auto along = [&](std::vector<double>& out, double t, const std::vector<double>& to) {
    for (std::size_t i = 0; i < d; ++i) out[i] = centroid[i] + t * (to[i] - centroid[i]);
  };

  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[d - 1];

    const double lo = fv[best];
    const double hi = fv[worst];
    if (std::isfinite(hi) && hi - lo <= opts.reltol * (std::abs(lo) + opts.reltol)) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opts.max_iters) break;
    ++res.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= d; ++v)
      if (v != worst)
        for (std::size_t i = 0; i < d; ++i) centroid[i] += pts[v][i];
    for (double& c : centroid) c /= static_cast<double>(d);

    along(trial, -opts.reflect, pts[worst]);
    const double fr = eval(trial);
    if (fr < lo) {
      along(trial2, -opts.reflect * opts.expand, pts[worst]);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        fv[worst] = fe;
      } else {
        pts[worst] = trial;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = trial;
      fv[worst] = fr;
      continue;
    }
    // contraction, outside when the reflected point beats the worst vertex
    const bool outside = fr < hi;
    along(trial2, outside ? -opts.contract : opts.contract, pts[worst]);
    const double fc = eval(trial2);
    if (fc < std::min(fr, hi)) {
      pts[worst] = trial2;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t v = 0; v <= d; ++v) {
      if (v == best) continue;
      for (std::size_t i = 0; i < d; ++i)
        pts[v][i] = pts[best][i] + opts.shrink * (pts[v][i] - pts[best][i]);
      fv[v] = eval(pts[v]);
    }
  }

  const auto it = std::min_element(fv.begin(), fv.end());
  res.x = pts[static_cast<std::size_t>(it - fv.begin())];
  res.value = *it;
  return res;
}

}  // namespace nigmg
