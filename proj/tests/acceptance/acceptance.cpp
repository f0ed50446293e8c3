// Acceptance checks, one per criterion. Usage: acceptance <1..9> [...]
// Each criterion prints a single PASS/FAIL line; the exit status is nonzero
// when any requested criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "instances.hpp"
#include "nigmg/decision.hpp"
#include "nigmg/ebayes.hpp"
#include "nigmg/grove.hpp"
#include "nigmg/rng.hpp"
#include "nigmg/simbench.hpp"
#include "nigmg/wavelet.hpp"
#include "oracle.hpp"

using namespace nigmg;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances, pinned.
constexpr double kOracleRel = 1e-8;
constexpr double kMtMgTol = 1e-10;
constexpr double kRoundTrip = 1e-10;
constexpr double kParseval = 1e-12;
constexpr double kSamplerSEs = 4.0;
constexpr double kDopplerLo = 0.007, kDopplerHi = 0.015;
constexpr double kHeavisineLo = 0.0011, kHeavisineHi = 0.0024;
constexpr double kPriorSEs = 3.0;
constexpr double kDemoNull = 0.5, kDemoNullTol = 0.1;
constexpr double kScaling = 2.5;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(b), 1e-300);
  return std::abs(a - b) / scale;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst_ev = 0.0, worst_pmap = 0.0, worst_pjap = 0.0;
  std::mt19937_64 pick(2024);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::size_t L = 1 + i % 2;
    std::vector<int> levels(L);
    for (int& g : levels) g = 2 + static_cast<int>(pick() % 2);
    const std::size_t n = 4 + pick() % 6;  // 4..9
    const auto inst = oracle::random_instance(1000 + i, 2, L, n, levels);
    const auto e = oracle::enumerate(2, L, inst.hp, oracle::node_log_likelihoods(inst));
    const auto g = upward_pass(inst.data, inst.design, inst.hp);
    const auto m = downward_marginals(g);
    worst_ev = std::max(worst_ev, rel_err(g.log_evidence(), e.log_evidence));
    for (std::size_t l = 0; l < L; ++l) {
      // PJAP near 1 is compared through its complement
      const double a = pjap(g, l), b = e.pjap[l];
      worst_pjap = std::max(worst_pjap, std::min(rel_err(a, b), rel_err(1 - a, 1 - b)));
      for (std::size_t f = 0; f < g.nodes(); ++f)
        worst_pmap = std::max(worst_pmap, rel_err(m.pmap(NodeIndex::from_flat(f), l), e.pmap[l * g.nodes() + f]));
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_ev <= kOracleRel && worst_pmap <= kOracleRel && worst_pjap <= kOracleRel && secs < 60;
  return {ok, fmt("max rel err: evidence %.2e, PMAP %.2e, PJAP %.2e (tol %.0e); %.1fs (limit 60s)", worst_ev,
                  worst_pmap, worst_pjap, kOracleRel, secs)};
}

Outcome mt_mg_consistency() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::size_t n = 1 + i % 8;
    const int J = 1 + static_cast<int>(i % 5);
    const auto inst = oracle::random_instance(500 + i, J, 0, n, {});
    const std::size_t N = node_count(J);
    // single-function tables from the closed form
    std::vector<double> log_m(N * 2);
    std::vector<double> dbar(N);
    for (std::size_t f = 0; f < N; ++f) {
      double s = 0.0, ss = 0.0;
      for (double v : inst.data.node(f)) {
        s += v;
        ss += v * v;
      }
      dbar[f] = s / n;
      for (int st = 0; st < 2; ++st)
        log_m[f * 2 + st] = log_marginal_mt(dbar[f], ss, n, st, NodeIndex::from_flat(f).j, inst.hp);
    }
    const auto mt = upward_pass_loglik(J, 0, inst.hp, log_m);
    const auto mt_marg = downward_marginals(mt);
    const auto mg = upward_pass(inst.data, inst.design, inst.hp);
    const auto mg_marg = downward_marginals(mg);
    const auto z = posterior_mean_z(mg, mg_marg);
    worst = std::max(worst, rel_err(mg.log_evidence(), mt.log_evidence()));
    for (std::size_t f = 0; f < N; ++f) {
      const NodeIndex node = NodeIndex::from_flat(f);
      const double p = mt_marg.baseline(node);
      worst = std::max(worst, std::abs(mg_marg.baseline(node) - p));
      const double shrink = p * n / (n + 1.0 / inst.hp.tau_at(node.j)) * dbar[f];
      worst = std::max(worst, std::abs(z.at(node) - shrink));
    }
  }
  return {worst <= kMtMgTol, fmt("max discrepancy %.2e over 20 instances (tol %.0e)", worst, kMtMgTol)};
}

Outcome dwt_correctness() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  double worst_rt = 0.0, worst_pv = 0.0;
  for (auto name : {FilterName::haar, FilterName::la10}) {
    const auto f = make_filter(name);
    for (std::size_t T = 8; T <= 4096; T *= 2) {
      std::vector<double> y(T);
      for (double& v : y) v = z(rng);
      const auto c = forward_dwt(y, f);
      double ey = 0.0, ec = c.father() * c.father();
      for (double v : y) ey += v * v;
      for (double v : c.mothers()) ec += v * v;
      worst_pv = std::max(worst_pv, std::abs(ec - ey) / ey);
      const auto back = inverse_dwt(c, f);
      for (std::size_t i = 0; i < T; ++i) worst_rt = std::max(worst_rt, std::abs(back[i] - y[i]));
    }
  }
  // analytic Haar cases, exact up to the last bit of sqrt(2) arithmetic
  const auto haar = make_filter(FilterName::haar);
  const double ulp = 4 * std::numeric_limits<double>::epsilon();
  const auto flat = forward_dwt(std::vector<double>{1, 1, 1, 1}, haar);
  bool analytic = std::abs(flat.father() - 2.0) <= 2 * ulp;
  for (double v : flat.mothers()) analytic = analytic && v == 0.0;
  const auto alt = forward_dwt(std::vector<double>{1, -1, 1, -1}, haar);
  analytic = analytic && std::abs(alt.father()) <= ulp && std::abs(alt.at({0, 0})) <= ulp;
  analytic = analytic && std::abs(std::abs(alt.at({1, 0})) - std::sqrt(2.0)) <= 2 * ulp;
  analytic = analytic && std::abs(std::abs(alt.at({1, 1})) - std::sqrt(2.0)) <= 2 * ulp;
  for (double v : inverse_dwt(CoefficientTree(1, 2.0, {0, 0, 0}), haar))
    analytic = analytic && std::abs(v - 1.0) <= ulp;

  const bool ok = worst_rt <= kRoundTrip && worst_pv <= kParseval && analytic;
  return {ok, fmt("round trip %.2e (tol %.0e), Parseval rel %.2e (tol %.0e), Haar analytic %s", worst_rt,
                  kRoundTrip, worst_pv, kParseval, analytic ? "ok" : "MISMATCH")};
}

Outcome sampler_consistency() {
  const std::size_t draws_n = 20000;
  const auto inst = oracle::random_instance(4242, 2, 1, 6, {3});  // T = 16
  const WaveletData& d = inst.data;
  WaveletData data16 = d;
  const auto g = upward_pass(data16, inst.design, inst.hp);
  const auto m = downward_marginals(g);
  const auto z = posterior_mean_z(g, m);
  const auto draws = sample_posterior(g, draws_n, 77);
  const double n = static_cast<double>(draws_n);
  double worst_freq = 0.0, worst_mean = 0.0;
  for (std::size_t f = 0; f < g.nodes(); ++f) {
    const NodeIndex node = NodeIndex::from_flat(f);
    double on = 0.0, s = 0.0, ss = 0.0;
    for (const auto& dr : draws) {
      on += factor_bit(dr.states[f], 1, 0);
      s += dr.node(f)[0];
      ss += dr.node(f)[0] * dr.node(f)[0];
    }
    const double p = m.pmap(node, 0);
    const double se_p = std::sqrt(p * (1 - p) / n);
    const double dev_p = std::abs(on / n - p);
    worst_freq = std::max(worst_freq, se_p > 0 ? dev_p / se_p : (dev_p == 0 ? 0.0 : INFINITY));
    const double mean = s / n;
    const double se_z = std::sqrt(std::max(ss / n - mean * mean, 0.0) / n);
    const double dev_z = std::abs(mean - z.at(node));
    worst_mean = std::max(worst_mean, se_z > 0 ? dev_z / se_z : (dev_z < 1e-12 ? 0.0 : INFINITY));
  }
  const bool ok = worst_freq <= kSamplerSEs && worst_mean <= kSamplerSEs;
  return {ok, fmt("T=16, %zu draws: max |freq - PMAP| = %.2f SE, max |mean z - E z| = %.2f SE (limit %.0f)",
                  draws_n, worst_freq, worst_mean, kSamplerSEs)};
}

Outcome denoising_amse() {
  const auto t0 = Clock::now();
  const auto filter = make_filter(FilterName::la10);
  FitSpec spec;  // full EB with defaults
  auto mean_amse = [&](TestFunctionName name, double rsnr) {
    const auto f = standardized_test_function(name, 1024);
    const double sigma = noise_sigma_for_rsnr(f, rsnr);
    double total = 0.0;
    for (std::uint64_t r = 0; r < 20; ++r) {
      auto rng = make_stream(100 + r, 0);
      std::normal_distribution<double> noise(0.0, sigma);
      std::vector<double> y(f);
      for (double& v : y) v += noise(rng);
      total += amse(nigmt_denoise(y, filter, spec), f);
    }
    return total / 20.0;
  };
  const double dop = mean_amse(TestFunctionName::doppler, 3.0);
  const double hea = mean_amse(TestFunctionName::heavisine, 7.0);
  const double secs = seconds_since(t0);
  const bool ok = dop >= kDopplerLo && dop <= kDopplerHi && hea >= kHeavisineLo && hea <= kHeavisineHi &&
                  secs < 900;
  return {ok, fmt("doppler RSNR 3 mean AMSE %.5f in [%.3f, %.3f]; heavisine RSNR 7 %.5f in [%.4f, %.4f]; %.0fs",
                  dop, kDopplerLo, kDopplerHi, hea, kHeavisineLo, kHeavisineHi, secs)};
}

Outcome roc_dominance() {
  const auto t0 = Clock::now();
  Scenario s;
  s.effect.kind = EffectKind::local;
  s.rsnr = 3.0;
  const auto filter = make_filter(s.filter);
  FitSpec spec;
  spec.mode = FitMode::hybrid;
  spec.restarts = 1;
  spec.fixed_sparsity = std::pair{calibrate_sparsity(0.5, 0.4, levels_for_length(s.T), 1), 0.4};
  std::vector<double> pa, pn, wa, wn, ta, tn;
  for (std::uint64_t r = 0; r < 50; ++r)
    for (int null = 0; null < 2; ++null) {
      const Dataset d = generate(s, 1000 + 2 * r + null, null);
      (null ? pn : pa).push_back(nigmg_pjap(d, filter, spec));
      (null ? wn : wa).push_back(pointwise_f_test(d, TestDomain::wavelet).statistic);
      (null ? tn : ta).push_back(pointwise_f_test(d, TestDomain::time).statistic);
    }
  const double nig = roc(pa, pn).auc, wf = roc(wa, wn).auc, tt = roc(ta, tn).auc;
  const double secs = seconds_since(t0);
  const bool ok = nig > wf && nig > tt && secs < 1200;
  return {ok, fmt("AUC NIG-MG %.4f, wfANOVA %.4f, tANOVA %.4f (50 alt + 50 null); %.0fs", nig, wf, tt, secs)};
}

Outcome prior_calibration() {
  struct Triple {
    double eta, gamma;
    int J;
  };
  const Triple triples[] = {{0.05, 0.4, 3}, {0.1, 0.2, 5}, {0.3, 0.4, 7}, {0.02, 0.9, 6}, {0.5, 0.5, 2},
                            {0.01, 0.3, 9}, {0.2, 0.7, 4}, {0.8, 0.1, 1}, {0.04, 0.6, 8}, {0.15, 0.45, 6}};
  const std::size_t paths = 1000000;
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (const auto& t : triples) {
    const double p = prior_pjap(t.eta, t.gamma, t.J, 1);
    const double mc = oracle::simulate_prior_pjap(t.eta, t.gamma, t.J, paths, seed++);
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(paths));
    worst = std::max(worst, std::abs(mc - p) / se);
  }
  const int demo_J = levels_for_length(256);
  const double demo_null = 1.0 - prior_pjap(0.3, 0.4, demo_J, 1);
  const bool sim_ok = worst <= kPriorSEs;
  const bool demo_ok = std::abs(demo_null - kDemoNull) <= kDemoNullTol;
  return {sim_ok && demo_ok,
          fmt("forward simulation: max %.2f SE over 10 triples (limit %.0f) %s; eta=0.3 gamma=0.4 J=%d prior null "
              "probability %.4f, required %.1f +/- %.1f %s",
              worst, kPriorSEs, sim_ok ? "ok" : "FAIL", demo_J, demo_null, kDemoNull, kDemoNullTol,
              demo_ok ? "ok" : "FAIL")};
}

Outcome complexity() {
  auto median_time = [](std::size_t T) {
    Scenario s;
    s.T = T;
    const Dataset d = generate(s, 1);
    const WaveletData w = transform_rows(d.rows, make_filter(FilterName::la10));
    HyperParams hp = default_hyperparams(w, d.design);
    hp.eta_kappa = 0.1;
    std::vector<double> times;
    for (int run = 0; run < 5; ++run) {
      const auto t0 = Clock::now();
      double sink = 0.0;
      for (int rep = 0; rep < 20; ++rep) sink += upward_pass(w, d.design, hp).log_evidence();
      times.push_back(seconds_since(t0));
      if (!std::isfinite(sink)) times.back() = INFINITY;
    }
    std::nth_element(times.begin(), times.begin() + 2, times.end());
    return times[2];
  };
  median_time(1024);  // warm-up
  const double t1 = median_time(1024);
  const double t2 = median_time(2048);
  const double ratio = t2 / t1;
  return {ratio <= kScaling, fmt("median upward pass (x20): T=1024 %.4fs, T=2048 %.4fs, ratio %.2f (limit %.1f)", t1,
                                 t2, ratio, kScaling)};
}

Outcome fdr_arithmetic() {
  bool hand = true;
  const std::vector<double> p{0.9, 0.6, 0.3};
  const auto r = evaluate(p, 0.5);
  hand = hand && r.called.size() == 2 && r.nfp == 0.5 && r.fdr == 0.25;
  const auto none = evaluate(p, 0.95);
  hand = hand && none.called.empty() && none.fdr == 0.0;
  const auto ones = evaluate(std::vector<double>(4, 1.0), 0.7);
  hand = hand && ones.called.size() == 4 && ones.fdr == 0.0;
  const auto a = threshold_for_fdr(p, 0.2);
  hand = hand && a.n_called == 1 && evaluate(p, a.delta).called.size() == 1;
  const auto b = threshold_for_fdr(p, 0.3);
  hand = hand && b.n_called == 2 && evaluate(p, b.delta).fdr == 0.25;
  const auto t = threshold_for_fdr(std::vector<double>{0.8, 0.8}, 0.25);
  hand = hand && t.n_called == 2;

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0, solved = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> pm(1 + rng() % 200);
    const bool coarse = rep % 4 == 0;  // many ties
    for (double& v : pm) v = coarse ? std::round(u(rng) * 20) / 20 : std::pow(u(rng), 0.3);
    const double target = 0.01 + 0.3 * u(rng);
    const auto thr = threshold_for_fdr(pm, target);
    const auto e = evaluate(pm, thr.delta);
    if (thr.no_calls) {
      violations += !e.called.empty();
    } else {
      ++solved;
      violations += e.fdr > target || e.called.size() != thr.n_called;
    }
  }
  return {hand && violations == 0,
          fmt("hand examples %s; %d violations over 1000 random tables (%d with calls)", hand ? "exact" : "WRONG",
              violations, solved)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<Outcome()> criteria[] = {oracle_equivalence, mt_mg_consistency, dwt_correctness,
                                               sampler_consistency, denoising_amse,      roc_dominance,
                                               prior_calibration,  complexity,        fdr_arithmetic};
  const char* names[] = {"oracle equivalence", "MT/MG consistency", "DWT correctness",
                         "sampler consistency", "denoising AMSE",     "ROC dominance",
                         "prior calibration",   "complexity",       "FDR arithmetic"};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 9; ++i) which.push_back(i);
  bool all = true;
  for (int c : which) {
    if (c < 1 || c > 9) {
      std::fprintf(stderr, "unknown criterion %d\n", c);
      return 2;
    }
    Outcome o;
    try {
      o = criteria[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s - %s\n", c, names[c - 1], o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
