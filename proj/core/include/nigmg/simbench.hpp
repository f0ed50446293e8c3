#pragma once

// Desk-scale simulation harness: Donoho-Johnstone test functions,
// RSNR-calibrated noise, one-way fANOVA data with global or local group
// effects, pointwise F-test comparators, AMSE and ROC.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nigmg/ebayes.hpp"
#include "nigmg/nodemodel.hpp"
#include "nigmg/wavelet.hpp"

namespace nigmg {

enum class TestFunctionName { blocks, bumps, doppler, heavisine };

TestFunctionName parse_test_function(std::string_view name);
std::string_view to_string(TestFunctionName name);

/// Published closed form sampled at t_i = (i + 1) / T, i = 0..T-1.
std::vector<double> test_function(TestFunctionName name, std::size_t T);
/// Same curve rescaled to sample sd 1 (T - 1 denominator), mean kept.
std::vector<double> standardized_test_function(TestFunctionName name, std::size_t T);

/// Sample sd with the T - 1 denominator.
double sample_sd(std::span<const double> f);
/// sd(f) / rsnr; throws ErrorKind::domain for constant f or rsnr <= 0.
double noise_sigma_for_rsnr(std::span<const double> f, double rsnr);

enum class EffectKind { none, global, local };

struct EffectSpec {
  EffectKind kind = EffectKind::none;
  TestFunctionName function = TestFunctionName::doppler;  // global effects
  double scale = 1.0;       // global: b = scale * standardized(function)
  double start = 0.85;      // local: b = proportion * f on [start, start + length)
  double length = 0.05;
  double proportion = 0.5;
};

struct Scenario {
  TestFunctionName baseline = TestFunctionName::doppler;
  EffectSpec effect;
  int groups = 3;
  int replicates = 3;  // per group
  std::size_t T = 1024;
  double rsnr = 3.0;
  FilterName filter = FilterName::la10;

  void validate() const;
};

/// Group g mean is f + b^(g) with b^(1) = 0 and b^(2) = -b^(3) = b; further
/// groups alternate the sign of b.
struct Dataset {
  std::vector<std::vector<double>> rows;
  FactorDesign design;
  std::vector<double> baseline;  // f
  std::vector<double> effect;    // b
  double sigma = 0.0;
  std::vector<std::uint8_t> truth;  // per mother node: DWT(b) coefficient != 0
};

/// Seed-deterministic draw. With `null` set the effect is zeroed.
Dataset generate(const Scenario& s, std::uint64_t seed, bool null = false);

enum class TestDomain { wavelet, time };

struct FTestResult {
  std::vector<double> f;        // per coordinate, +inf when within-group SS is 0
  std::vector<double> p;        // per coordinate
  double min_p = 1.0;
  double min_p_bonferroni = 1.0;  // min(1, m * min_p)
  double statistic = 0.0;       // -log(min_p); larger means stronger evidence
};

/// One-way F test per coordinate using the first factor's labels. The
/// wavelet domain covers the T - 1 mother coefficients.
FTestResult pointwise_f_test(const Dataset& d, TestDomain domain);
/// Classical one-way F statistic for one coordinate.
double one_way_f(std::span<const double> values, std::span<const int> labels, int groups);

double amse(std::span<const double> estimate, std::span<const double> truth);

struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.0;
};

/// Threshold sweep over all distinct statistics (larger = alternative).
RocCurve roc(std::span<const double> alt, std::span<const double> null);

/// NIG-MT posterior mean of a single noisy curve, hyperparameters by `spec`.
std::vector<double> nigmt_denoise(std::span<const double> y, const WaveletFilter& filter,
                                  const FitSpec& spec);

/// PJAP of the first factor after fitting per `spec` (hybrid needs
/// spec.fixed_sparsity).
double nigmg_pjap(const Dataset& d, const WaveletFilter& filter, const FitSpec& spec);

}  // namespace nigmg
