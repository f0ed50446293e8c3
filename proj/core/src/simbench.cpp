#include "nigmg/simbench.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "nigmg/error.hpp"
#include "nigmg/grove.hpp"
#include "nigmg/rng.hpp"

namespace nigmg {

namespace {

constexpr std::array<double, 11> kJumps = {0.10, 0.13, 0.15, 0.23, 0.25, 0.40,
                                           0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<double, 11> kBlockHeights = {4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
constexpr std::array<double, 11> kBumpHeights = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<double, 11> kBumpWidths = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                                0.01,  0.01,  0.005, 0.008, 0.005};

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

double evaluate_at(TestFunctionName name, double t) {
  switch (name) {
    case TestFunctionName::blocks: {
      double v = 0.0;
      for (std::size_t i = 0; i < kJumps.size(); ++i)
        if (t >= kJumps[i]) v += kBlockHeights[i];
      return v;
    }
    case TestFunctionName::bumps: {
      double v = 0.0;
      for (std::size_t i = 0; i < kJumps.size(); ++i)
        v += kBumpHeights[i] * std::pow(1.0 + std::abs((t - kJumps[i]) / kBumpWidths[i]), -4.0);
      return v;
    }
    case TestFunctionName::doppler:
      return std::sqrt(t * (1.0 - t)) * std::sin(2.0 * std::numbers::pi * 1.05 / (t + 0.05));
    case TestFunctionName::heavisine:
      return 4.0 * std::sin(4.0 * std::numbers::pi * t) - sgn(t - 0.3) - sgn(0.72 - t);
  }
  return 0.0;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TestFunctionName parse_test_function(std::string_view name) {
  if (name == "blocks") return TestFunctionName::blocks;
  if (name == "bumps") return TestFunctionName::bumps;
  if (name == "doppler") return TestFunctionName::doppler;
  if (name == "heavisine") return TestFunctionName::heavisine;
  fail(ErrorKind::domain, "unknown test function '" + std::string(name) + "'");
}

std::string_view to_string(TestFunctionName name) {
  switch (name) {
    case TestFunctionName::blocks: return "blocks";
    case TestFunctionName::bumps: return "bumps";
    case TestFunctionName::doppler: return "doppler";
    case TestFunctionName::heavisine: return "heavisine";
  }
  return "doppler";
}

std::vector<double> test_function(TestFunctionName name, std::size_t T) {
  levels_for_length(T);
  std::vector<double> f(T);
  for (std::size_t i = 0; i < T; ++i)
    f[i] = evaluate_at(name, static_cast<double>(i + 1) / static_cast<double>(T));
  return f;
}

std::vector<double> standardized_test_function(TestFunctionName name, std::size_t T) {
  std::vector<double> f = test_function(name, T);
  const double m = mean_of(f);
  const double sd = sample_sd(f);
  for (double& v : f) v = m + (v - m) / sd;
  return f;
}

double sample_sd(std::span<const double> f) {
  require(f.size() >= 2, ErrorKind::length, "need at least two values for an sd");
  const double m = mean_of(f);
  double ss = 0.0;
  for (double v : f) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(f.size() - 1));
}

double noise_sigma_for_rsnr(std::span<const double> f, double rsnr) {
  require(std::isfinite(rsnr) && rsnr > 0.0, ErrorKind::domain, "RSNR must be > 0");
  const double sd = sample_sd(f);
  require(sd > 0.0, ErrorKind::domain, "signal is constant; RSNR is undefined");
  return sd / rsnr;
}

void Scenario::validate() const {
  require(is_dyadic(T), ErrorKind::length, "scenario length " + std::to_string(T) + " is not dyadic");
  require(std::isfinite(rsnr) && rsnr > 0.0, ErrorKind::domain, "RSNR must be > 0");
  require(groups >= 2, ErrorKind::design, "need at least two groups");
  require(replicates >= 1, ErrorKind::design, "need at least one replicate per group");
  if (effect.kind == EffectKind::local) {
    require(effect.length > 0.0 && effect.start >= 0.0 && effect.start + effect.length <= 1.0,
            ErrorKind::domain, "local effect interval must lie inside [0, 1]");
  }
}

Dataset generate(const Scenario& s, std::uint64_t seed, bool null) {
  s.validate();
  const std::size_t T = s.T;
  Dataset d;
  d.baseline = standardized_test_function(s.baseline, T);
  d.effect.assign(T, 0.0);
  if (!null) {
    if (s.effect.kind == EffectKind::global) {
      const auto g = standardized_test_function(s.effect.function, T);
      const double m = mean_of(g);
      for (std::size_t i = 0; i < T; ++i) d.effect[i] = s.effect.scale * (g[i] - m);
    } else if (s.effect.kind == EffectKind::local) {
      for (std::size_t i = 0; i < T; ++i) {
        const double t = static_cast<double>(i + 1) / static_cast<double>(T);
        if (t >= s.effect.start && t < s.effect.start + s.effect.length)
          d.effect[i] = s.effect.proportion * d.baseline[i];
      }
    }
  }
  d.sigma = noise_sigma_for_rsnr(d.baseline, s.rsnr);

  const CoefficientTree beta = forward_dwt(d.effect, make_filter(s.filter));
  d.truth.resize(beta.mothers().size());
  for (std::size_t f = 0; f < d.truth.size(); ++f) d.truth[f] = beta.mothers()[f] != 0.0;

  std::mt19937_64 rng = make_stream(seed, 0);
  std::normal_distribution<double> noise(0.0, d.sigma);
  std::vector<int> labels;
  for (int g = 0; g < s.groups; ++g) {
    // b^(1) = 0, then +b, -b, +b, ...
    const double sign = g == 0 ? 0.0 : (g % 2 == 1 ? 1.0 : -1.0);
    for (int r = 0; r < s.replicates; ++r) {
      std::vector<double> y(T);
      for (std::size_t i = 0; i < T; ++i) y[i] = d.baseline[i] + sign * d.effect[i] + noise(rng);
      d.rows.push_back(std::move(y));
      labels.push_back(g);
    }
  }
  d.design = FactorDesign({s.groups}, {labels});
  return d;
}

double one_way_f(std::span<const double> values, std::span<const int> labels, int groups) {
  require(values.size() == labels.size(), ErrorKind::shape, "values and labels differ in length");
  const std::size_t n = values.size();
  require(groups >= 2 && n > static_cast<std::size_t>(groups), ErrorKind::design,
          "F test needs at least two groups and positive within-group df");
  std::vector<double> sum(static_cast<std::size_t>(groups), 0.0);
  std::vector<double> cnt(static_cast<std::size_t>(groups), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum[static_cast<std::size_t>(labels[i])] += values[i];
    cnt[static_cast<std::size_t>(labels[i])] += 1.0;
    total += values[i];
  }
  const double grand = total / static_cast<double>(n);
  double ssb = 0.0;
  for (std::size_t g = 0; g < sum.size(); ++g)
    if (cnt[g] > 0.0) {
      const double m = sum[g] / cnt[g];
      ssb += cnt[g] * (m - grand) * (m - grand);
    }
  double ssw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(labels[i]);
    const double r = values[i] - sum[g] / cnt[g];
    ssw += r * r;
  }
  const double df_b = groups - 1.0;
  const double df_w = static_cast<double>(n) - groups;
  if (ssw <= 0.0) return std::numeric_limits<double>::infinity();
  return (ssb / df_b) / (ssw / df_w);
}

FTestResult pointwise_f_test(const Dataset& d, TestDomain domain) {
  require(d.design.factors() >= 1, ErrorKind::design, "F test needs a factor");
  const auto& labels = d.design.labels(0);
  const int G = d.design.levels(0);
  const std::size_t n = d.rows.size();
  const double df_b = G - 1.0;
  const double df_w = static_cast<double>(n) - G;
  require(df_w > 0.0, ErrorKind::design, "no within-group degrees of freedom");
  const boost::math::fisher_f_distribution<double> dist(df_b, df_w);

  std::vector<std::vector<double>> coords;  // coordinate-major
  const std::size_t T = d.rows.front().size();
  if (domain == TestDomain::time) {
    coords.assign(T, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < T; ++t) coords[t][i] = d.rows[i][t];
  } else {
    const WaveletData w = transform_rows(d.rows, make_filter(FilterName::la10));
    coords.assign(node_count(w.J), std::vector<double>(n));
    for (std::size_t f = 0; f < coords.size(); ++f) {
      const auto v = w.node(f);
      std::copy(v.begin(), v.end(), coords[f].begin());
    }
  }

  FTestResult r;
  r.f.resize(coords.size());
  r.p.resize(coords.size());
  for (std::size_t c = 0; c < coords.size(); ++c) {
    r.f[c] = one_way_f(coords[c], labels, G);
    r.p[c] = std::isinf(r.f[c]) ? 0.0 : boost::math::cdf(boost::math::complement(dist, r.f[c]));
    r.min_p = std::min(r.min_p, r.p[c]);
  }
  r.min_p_bonferroni = std::min(1.0, r.min_p * static_cast<double>(coords.size()));
  r.statistic = r.min_p > 0.0 ? -std::log(r.min_p) : std::numeric_limits<double>::infinity();
  return r;
}

double amse(std::span<const double> estimate, std::span<const double> truth) {
  require(estimate.size() == truth.size() && !truth.empty(), ErrorKind::length,
          "estimate and truth differ in length");
  double ss = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) ss += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
  return ss / static_cast<double>(truth.size());
}

RocCurve roc(std::span<const double> alt, std::span<const double> null) {
  require(!alt.empty() && !null.empty(), ErrorKind::domain, "ROC needs both samples");
  std::vector<double> thresholds(alt.begin(), alt.end());
  thresholds.insert(thresholds.end(), null.begin(), null.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  auto count_at_least = [](std::span<const double> v, double t) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [t](double x) { return x >= t; }));
  };
  RocCurve c;
  c.fpr.push_back(0.0);
  c.tpr.push_back(0.0);
  for (double t : thresholds) {
    c.fpr.push_back(count_at_least(null, t) / static_cast<double>(null.size()));
    c.tpr.push_back(count_at_least(alt, t) / static_cast<double>(alt.size()));
  }
  for (std::size_t i = 1; i < c.fpr.size(); ++i)
    c.auc += (c.fpr[i] - c.fpr[i - 1]) * 0.5 * (c.tpr[i] + c.tpr[i - 1]);
  return c;
}

std::vector<double> nigmt_denoise(std::span<const double> y, const WaveletFilter& filter,
                                  const FitSpec& spec) {
  const std::vector<std::vector<double>> rows{std::vector<double>(y.begin(), y.end())};
  const WaveletData w = transform_rows(rows, filter);
  const FactorDesign design = FactorDesign::replicates(1);
  const FitResult fit = mmle_fit(w, design, spec, default_hyperparams(w, design));
  const PosteriorGrove g = upward_pass(w, design, fit.hp);
  return inverse_dwt(posterior_mean_z(g, downward_marginals(g)), filter);
}

double nigmg_pjap(const Dataset& d, const WaveletFilter& filter, const FitSpec& spec) {
  const WaveletData w = transform_rows(d.rows, filter);
  HyperParams init = default_hyperparams(w, d.design);
  if (spec.fixed_sparsity) {
    init.eta_kappa = spec.fixed_sparsity->first;
    init.gamma_kappa = spec.fixed_sparsity->second;
  }
  const FitResult fit = mmle_fit(w, d.design, spec, init);
  return pjap(upward_pass(w, d.design, fit.hp), 0);
}

}  // namespace nigmg
