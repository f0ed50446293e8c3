#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "nigmg/error.hpp"
#include "nigmg/simbench.hpp"

using namespace nigmg;

TEST_CASE("test functions match an independent implementation") {
  // numpy evaluation of the published closed forms at t = (i + 1) / 1024
  struct Ref {
    TestFunctionName name;
    double at[4];
    double sd;
  };
  const Ref refs[] = {
      {TestFunctionName::blocks, {0.0, 0.0, 0.8999999999999999, 0.0}, 1.9151486204409076},
      {TestFunctionName::bumps,
       {0.00016235870694322787, 1.5236743736114327, 0.01287323411424801, 4.42823284867678e-05},
       0.6632669337495591},
      {TestFunctionName::doppler,
       {-0.01799242127650442, 0.11736547425448392, -0.2703204087277996, 0.020287296323111947},
       0.28913767157680964},
      {TestFunctionName::heavisine,
       {0.049086153142879674, 3.782429301522085, -2.000000000000001, -1.114078757540212},
       2.970721838777495},
  };
  const std::size_t idx[4] = {0, 100, 511, 1000};
  for (const Ref& r : refs) {
    const auto f = test_function(r.name, 1024);
    for (int i = 0; i < 4; ++i) CHECK(f[idx[i]] == doctest::Approx(r.at[i]).epsilon(1e-12));
    CHECK(sample_sd(f) == doctest::Approx(r.sd).epsilon(1e-12));
    CHECK(sample_sd(standardized_test_function(r.name, 1024)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("structure of blocks and heavisine") {
  const auto b = test_function(TestFunctionName::blocks, 1024);
  int changes = 0;
  for (std::size_t i = 1; i < b.size(); ++i) changes += b[i] != b[i - 1];
  CHECK(changes <= 11);

  const auto h = test_function(TestFunctionName::heavisine, 1024);
  int jumps = 0;
  for (std::size_t i = 1; i < h.size(); ++i) jumps += std::abs(h[i] - h[i - 1]) > 0.5;
  CHECK(jumps == 2);
  for (double v : h) CHECK(std::abs(v) <= 6.0);

  CHECK(parse_test_function("bumps") == TestFunctionName::bumps);
  CHECK_THROWS_AS(parse_test_function("spikes"), Error);
}

TEST_CASE("noise level from RSNR") {
  const std::vector<double> f{-2, 0, 2};  // sd 2
  CHECK(noise_sigma_for_rsnr(f, 1.0) == doctest::Approx(2.0));
  CHECK(noise_sigma_for_rsnr(f, 7.0) == doctest::Approx(2.0 / 7.0));
  CHECK_THROWS_AS(noise_sigma_for_rsnr(std::vector<double>(4, 1.0), 2.0), Error);
  CHECK_THROWS_AS(noise_sigma_for_rsnr(f, 0.0), Error);
}

TEST_CASE("generated data reach the requested RSNR") {
  Scenario s;
  s.T = 256;
  s.groups = 2;
  s.replicates = 1;
  s.rsnr = 3.0;
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Dataset d = generate(s, seed);
    std::vector<double> resid(s.T);
    for (std::size_t i = 0; i < s.T; ++i) resid[i] = d.rows[0][i] - d.baseline[i];
    sum += sample_sd(d.baseline) / sample_sd(resid);
  }
  CHECK(std::abs(sum / 100.0 - 3.0) < 0.05 * 3.0);
}

TEST_CASE("data generation") {
  Scenario s;
  s.T = 128;
  const Dataset none = generate(s, 1);
  CHECK(std::all_of(none.truth.begin(), none.truth.end(), [](auto v) { return v == 0; }));
  CHECK(none.rows.size() == 9);
  CHECK(none.truth.size() == 127);

  // same seed, same data
  const Dataset again = generate(s, 1);
  CHECK(again.rows == none.rows);
  CHECK(generate(s, 2).rows != none.rows);

  // local effect: nonzero coefficients only where the basis function meets the interval
  s.effect.kind = EffectKind::local;
  s.effect.start = 0.4;
  s.effect.length = 0.05;
  const Dataset loc = generate(s, 3);
  const auto filter = make_filter(s.filter);
  int nonzero = 0;
  for (std::size_t f = 0; f < loc.truth.size(); ++f) {
    CoefficientTree unit(levels_for_length(s.T));
    unit.mothers()[f] = 1.0;
    const auto psi = inverse_dwt(unit, filter);
    bool overlaps = false;
    for (std::size_t i = 0; i < s.T; ++i)
      if (loc.effect[i] != 0.0 && psi[i] != 0.0) overlaps = true;
    if (loc.truth[f]) {
      CHECK(overlaps);
      ++nonzero;
    }
  }
  CHECK(nonzero > 0);
  CHECK(nonzero < 127);

  const Dataset null = generate(s, 3, true);
  CHECK(std::all_of(null.effect.begin(), null.effect.end(), [](double v) { return v == 0.0; }));

  // noise-free limit: rows are the group means
  s.effect.kind = EffectKind::global;
  s.rsnr = 1e12;
  const Dataset clean = generate(s, 4);
  for (std::size_t r = 0; r < clean.rows.size(); ++r) {
    const int g = clean.design.labels(0)[r];
    const double sign = g == 0 ? 0.0 : (g == 1 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < s.T; ++i)
      CHECK(clean.rows[r][i] == doctest::Approx(clean.baseline[i] + sign * clean.effect[i]).epsilon(1e-9));
  }

  s.T = 100;
  CHECK_THROWS_AS(generate(s, 1), Error);
}

TEST_CASE("one-way F") {
  const std::vector<double> v{0, 2, 1, 3};
  const std::vector<int> lab{0, 0, 1, 1};
  CHECK(one_way_f(v, lab, 2) == doctest::Approx(0.5));
  // renaming the groups changes nothing
  const std::vector<int> swapped{1, 1, 0, 0};
  CHECK(one_way_f(v, swapped, 2) == one_way_f(v, lab, 2));
  CHECK(std::isinf(one_way_f(std::vector<double>{1, 1, 2, 2}, lab, 2)));
}

TEST_CASE("F statistics under the null follow the F distribution") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  const int G = 3, per = 4;
  std::vector<int> lab;
  for (int g = 0; g < G; ++g)
    for (int r = 0; r < per; ++r) lab.push_back(g);
  const std::size_t n = 10000;
  std::vector<double> stats(n), v(G * per);
  for (auto& s : stats) {
    for (double& x : v) x = z(rng);
    s = one_way_f(v, lab, G);
  }
  std::sort(stats.begin(), stats.end());
  const boost::math::fisher_f dist(G - 1, G * per - G);
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = boost::math::cdf(dist, stats[i]);
    ks = std::max({ks, std::abs(c - static_cast<double>(i) / n), std::abs(c - static_cast<double>(i + 1) / n)});
  }
  // 1e-3 critical value of the Kolmogorov distribution is 1.949 / sqrt(n)
  CHECK(ks < 1.949 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("pointwise F tests") {
  Scenario s;
  s.T = 64;
  s.effect.kind = EffectKind::global;
  s.effect.scale = 2.0;
  const Dataset d = generate(s, 5);
  const auto w = pointwise_f_test(d, TestDomain::wavelet);
  const auto t = pointwise_f_test(d, TestDomain::time);
  CHECK(w.f.size() == 63);
  CHECK(t.f.size() == 64);
  CHECK(w.min_p == *std::min_element(w.p.begin(), w.p.end()));
  CHECK(w.min_p_bonferroni == doctest::Approx(std::min(1.0, 63 * w.min_p)));
  CHECK(w.statistic == doctest::Approx(-std::log(w.min_p)));
  for (double p : t.p) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("AMSE") {
  const std::vector<double> truth{1, 2, 3, 4};
  CHECK(amse(truth, truth) == 0.0);
  std::vector<double> off = truth;
  for (double& v : off) v += 0.1;
  CHECK(amse(off, truth) == doctest::Approx(0.01));
  CHECK_THROWS_AS(amse(std::vector<double>{1}, truth), Error);
}

TEST_CASE("ROC") {
  const auto sep = roc(std::vector<double>{5, 6, 7}, std::vector<double>{1, 2, 3});
  CHECK(sep.auc == 1.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::vector<double> a(2000), b(2000);
  for (double& v : a) v = z(rng);
  for (double& v : b) v = z(rng);
  const auto same = roc(a, b);
  // sd of the AUC under identical distributions is sqrt((n+m+1)/(12nm))
  CHECK(std::abs(same.auc - 0.5) < 4.0 * std::sqrt(4001.0 / (12.0 * 2000 * 2000)));
  for (std::size_t i = 1; i < same.fpr.size(); ++i) {
    CHECK(same.fpr[i] >= same.fpr[i - 1]);
    CHECK(same.tpr[i] >= same.tpr[i - 1]);
  }
  CHECK(same.fpr.back() == 1.0);
  CHECK(same.tpr.back() == 1.0);

  // ties between samples count half
  CHECK(roc(std::vector<double>{1}, std::vector<double>{1}).auc == doctest::Approx(0.5));
}

TEST_CASE("NIG-MG PJAP on a small scenario") {
  Scenario s;
  s.T = 64;
  s.effect.kind = EffectKind::global;
  s.effect.scale = 1.0;
  FitSpec spec;
  spec.mode = FitMode::hybrid;
  spec.fixed_sparsity = std::pair{0.05, 0.4};
  spec.restarts = 1;
  const auto filter = make_filter(FilterName::la10);
  const double alt = nigmg_pjap(generate(s, 1), filter, spec);
  CHECK(alt > 0.9);
  CHECK(alt <= 1.0);
}

TEST_CASE("denoising a constant curve returns its level") {
  const std::vector<double> y(32, 3.0);
  FitSpec spec;
  spec.mode = FitMode::fixed;
  const auto est = nigmt_denoise(y, make_filter(FilterName::haar), spec);
  for (double v : est) CHECK(v == doctest::Approx(3.0).epsilon(1e-8));
}
