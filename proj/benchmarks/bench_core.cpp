#include <benchmark/benchmark.h>

#include "nigmg/ebayes.hpp"
#include "nigmg/grove.hpp"
#include "nigmg/simbench.hpp"
#include "nigmg/wavelet.hpp"

using namespace nigmg;

namespace {

struct Setup {
  Dataset data;
  WaveletData coeffs;
  HyperParams hp;
};

Setup make_setup(std::size_t T) {
  Scenario s;
  s.T = T;
  Setup out{generate(s, 1), {}, {}};
  out.coeffs = transform_rows(out.data.rows, make_filter(FilterName::la10));
  out.hp = default_hyperparams(out.coeffs, out.data.design);
  out.hp.eta_kappa = 0.1;
  return out;
}

void BM_UpwardPass(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(upward_pass(s.coeffs, s.data.design, s.hp).log_evidence());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UpwardPass)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oN);

void BM_ForwardDwt(benchmark::State& state) {
  const auto f = make_filter(FilterName::la10);
  const std::vector<double> y = test_function(TestFunctionName::doppler, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forward_dwt(y, f).father());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardDwt)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oN);

void BM_Sampling(benchmark::State& state) {
  const Setup s = make_setup(1024);
  const auto g = upward_pass(s.coeffs, s.data.design, s.hp);
  for (auto _ : state) benchmark::DoNotOptimize(sample_posterior(g, 100, 3).size());
}
BENCHMARK(BM_Sampling);

}  // namespace

BENCHMARK_MAIN();
