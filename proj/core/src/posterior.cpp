// Posterior sampling, posterior means and credible bands on a fitted grove.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nigmg/error.hpp"
#include "nigmg/grove.hpp"
#include "nigmg/parallel.hpp"
#include "nigmg/rng.hpp"

namespace nigmg {

namespace {

JointState pick(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    acc += probs[x];
    if (u < acc) return static_cast<JointState>(x);
  }
  // u landed in the rounding slack above the cumulative sum: take the last
  // state with positive mass
  for (std::size_t x = probs.size(); x-- > 0;)
    if (probs[x] > 0.0) return static_cast<JointState>(x);
  return 0;
}

double contrast_value(const Contrast& c, std::span<const double> theta) {
  double v = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) v += c.weights[i] * theta[i];
  return v;
}

double contrast_value(const Contrast& c, const Eigen::VectorXd& theta) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) v += c.weights[static_cast<std::size_t>(i)] * theta(i);
  return v;
}

// type 7 sample quantile of sorted values
double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<PosteriorDraw> sample_posterior(const PosteriorGrove& g, std::size_t n_draws,
                                            std::uint64_t seed) {
  require(n_draws >= 1, ErrorKind::domain, "need at least one draw");
  const NodeModel& model = g.model();
  const std::size_t K = g.states();
  const std::size_t N = g.nodes();
  const std::size_t p = model.coefficient_count();
  const std::vector<double> root = g.root_distribution();
  const std::span<const double> father = g.father_distribution();

  std::vector<PosteriorDraw> draws(n_draws);
  parallel_for(n_draws, [&](std::size_t i) {
    std::mt19937_64 rng = make_stream(seed, i);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::gamma_distribution<double> gamma(model.ig_shape(), 1.0);

    PosteriorDraw& d = draws[i];
    d.coefficients = p;
    d.states.assign(N, 0);
    d.sigma_sq.assign(N, 0.0);
    d.coeffs.assign(N * p, 0.0);
    std::vector<double> row(K);
    std::vector<double> z(p);

    auto draw_node = [&](const NodeModel& m, const NodeStats& st, JointState x, int j,
                         double& sigma_sq, std::span<double> theta) {
      const double gv = gamma(rng);
      for (double& v : z) v = normal(rng);
      m.draw(st, x, j, gv, z, sigma_sq, theta);
    };

    for (std::size_t f = 0; f < N; ++f) {
      const NodeIndex n = NodeIndex::from_flat(f);
      JointState x;
      if (n.j == 0) {
        x = pick(root, unif(rng));
      } else {
        const JointState parent = d.states[n.parent().flat()];
        for (JointState b = 0; b < K; ++b) row[b] = g.posterior_transition(n, parent, b);
        x = pick(row, unif(rng));
      }
      d.states[f] = x;
      draw_node(model, g.node_stats(n), x, n.j, d.sigma_sq[f], {d.coeffs.data() + f * p, p});
    }

    d.father_state = pick(father, unif(rng));
    d.father_coeffs.assign(p, 0.0);
    draw_node(g.father_model(), g.father_stats(), d.father_state, 0, d.father_sigma_sq, d.father_coeffs);
  });
  return draws;
}

Contrast baseline_contrast(const FactorDesign& design) {
  Contrast c;
  c.label = "baseline";
  c.weights.assign(design.coefficient_count(), 0.0);
  c.weights[0] = 1.0;
  return c;
}

Contrast level_contrast(const FactorDesign& design, std::size_t factor, int a, int b) {
  require(factor < design.factors(), ErrorKind::domain, "factor index out of range");
  const int G = design.levels(factor);
  require(a >= 0 && a < G && b >= 0 && b < G, ErrorKind::domain,
          "contrast level out of range for factor " + std::to_string(factor + 1));
  Contrast c;
  c.label = "factor" + std::to_string(factor + 1) + ":" + std::to_string(a) + "-" +
            std::to_string(b);
  c.weights.assign(design.coefficient_count(), 0.0);
  if (a > 0) c.weights[design.column(factor, a)] += 1.0;
  if (b > 0) c.weights[design.column(factor, b)] -= 1.0;
  return c;
}

CoefficientTree posterior_mean(const PosteriorGrove& g, const PosteriorMarginals& m,
                               const Contrast& c, bool include_father) {
  const NodeModel& model = g.model();
  require(c.weights.size() == model.coefficient_count(), ErrorKind::shape,
          "contrast length does not match the design");
  const std::size_t K = g.states();
  CoefficientTree out(g.levels());
  for (std::size_t f = 0; f < g.nodes(); ++f) {
    const NodeIndex n = NodeIndex::from_flat(f);
    double acc = 0.0;
    for (JointState x = 0; x < K; ++x) {
      const double w = m.state(n, x);
      if (w == 0.0) continue;
      acc += w * contrast_value(c, model.mean(g.node_stats(n), x, n.j));
    }
    out.at(n) = acc;
  }
  if (include_father) {
    const auto fd = g.father_distribution();
    double acc = 0.0;
    for (JointState x = 0; x < K; ++x)
      if (fd[x] > 0.0) acc += fd[x] * contrast_value(c, g.father_model().mean(g.father_stats(), x, 0));
    out.father() = acc;
  }
  return out;
}

CoefficientTree posterior_mean_z(const PosteriorGrove& g, const PosteriorMarginals& m) {
  Contrast c;
  c.label = "baseline";
  c.weights.assign(g.model().coefficient_count(), 0.0);
  c.weights[0] = 1.0;
  return posterior_mean(g, m, c, true);
}

std::vector<double> draw_curve(const PosteriorDraw& d, const Contrast& c, bool include_father,
                               int J, const WaveletFilter& filter) {
  require(c.weights.size() == d.coefficients, ErrorKind::shape,
          "contrast length does not match the draw");
  CoefficientTree t(J);
  require(d.states.size() == node_count(J), ErrorKind::shape, "draw does not match tree size");
  for (std::size_t f = 0; f < node_count(J); ++f) t.mothers()[f] = contrast_value(c, d.node(f));
  if (include_father) t.father() = contrast_value(c, d.father_coeffs);
  return inverse_dwt(t, filter);
}

CredibleBand credible_band(std::span<const std::vector<double>> curves, double level) {
  require(level > 0.0 && level < 1.0, ErrorKind::domain, "band level must lie in (0, 1)");
  require(!curves.empty(), ErrorKind::domain, "no curves for the band");
  const std::size_t T = curves.front().size();
  for (const auto& c : curves)
    require(c.size() == T, ErrorKind::shape, "curves differ in length");
  CredibleBand band;
  band.level = level;
  band.lower.resize(T);
  band.upper.resize(T);
  band.mean.resize(T);
  std::vector<double> col(curves.size());
  for (std::size_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      col[i] = curves[i][t];
      sum += col[i];
    }
    std::sort(col.begin(), col.end());
    band.lower[t] = quantile_sorted(col, 0.5 * (1.0 - level));
    band.upper[t] = quantile_sorted(col, 0.5 * (1.0 + level));
    band.mean[t] = sum / static_cast<double>(curves.size());
  }
  return band;
}

CredibleBand credible_bands(std::span<const PosteriorDraw> draws, const Contrast& c,
                            double level, bool include_father, int J,
                            const WaveletFilter& filter) {
  require(level > 0.0 && level < 1.0, ErrorKind::domain, "band level must lie in (0, 1)");
  require(!draws.empty(), ErrorKind::domain, "no draws for the band");
  std::vector<std::vector<double>> curves;
  curves.reserve(draws.size());
  for (const auto& d : draws) curves.push_back(draw_curve(d, c, include_father, J, filter));
  return credible_band(curves, level);
}

}  // namespace nigmg
