#include "nigmg/ebayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "nigmg/error.hpp"
#include "nigmg/grove.hpp"
#include "nigmg/nelder_mead.hpp"
#include "nigmg/parallel.hpp"
#include "nigmg/rng.hpp"

namespace nigmg {

namespace {

double logit(double p) { return std::log(p) - std::log1p(-p); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Which entries of HyperParams are free, in a fixed order.
struct Layout {
  bool alpha = true;
  std::size_t factors = 0;
  bool kappa = true;

  std::size_t size() const {
    return (alpha ? 1 : 0) + 1 + factors + 4 + (kappa ? 2 : 0);
  }

  std::vector<double> encode(const HyperParams& hp) const {
    std::vector<double> x;
    if (alpha) x.push_back(std::log(hp.alpha));
    x.push_back(std::log(hp.tau));
    for (double u : hp.upsilon) x.push_back(std::log(u));
    x.push_back(std::log(hp.sigma0_sq));
    x.push_back(std::log(hp.nu));
    x.push_back(std::log(hp.eta_rho));
    x.push_back(logit(hp.gamma_rho));
    if (kappa) {
      x.push_back(std::log(hp.eta_kappa));
      x.push_back(logit(hp.gamma_kappa));
    }
    return x;
  }

  HyperParams decode(std::span<const double> x, HyperParams base) const {
    std::size_t i = 0;
    if (alpha) base.alpha = std::exp(x[i++]);
    base.tau = std::exp(x[i++]);
    for (std::size_t l = 0; l < factors; ++l) base.upsilon[l] = std::exp(x[i++]);
    base.sigma0_sq = std::exp(x[i++]);
    base.nu = std::exp(x[i++]);
    base.eta_rho = std::exp(x[i++]);
    base.gamma_rho = expit(x[i++]);
    if (kappa) {
      base.eta_kappa = std::exp(x[i++]);
      base.gamma_kappa = expit(x[i++]);
    }
    return base;
  }
};

double median(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

}  // namespace

FitMode parse_fit_mode(std::string_view s) {
  if (s == "eb" || s == "full_eb") return FitMode::full_eb;
  if (s == "hybrid") return FitMode::hybrid;
  if (s == "fixed") return FitMode::fixed;
  fail(ErrorKind::domain, "unknown fit mode '" + std::string(s) + "'");
}

std::string_view to_string(FitMode m) {
  switch (m) {
    case FitMode::full_eb: return "eb";
    case FitMode::hybrid: return "hybrid";
    case FitMode::fixed: return "fixed";
  }
  return "eb";
}

void FitSpec::validate() const {
  require(std::isfinite(tolerance) && tolerance > 0.0, ErrorKind::domain,
          "tolerance must be > 0");
  require(max_iters >= 1, ErrorKind::domain, "max_iters must be >= 1");
  require(restarts >= 1, ErrorKind::domain, "need at least one restart");
  if (mode == FitMode::hybrid)
    require(fixed_sparsity.has_value(), ErrorKind::domain,
            "hybrid fitting needs a fixed factor-tree sparsity");
}

double log_marginal(const HyperParams& hp, const WaveletData& data, const FactorDesign& design) {
  return upward_pass(data, design, hp).log_evidence();
}

HyperParams default_hyperparams(const WaveletData& data, const FactorDesign& design) {
  HyperParams hp;
  const std::size_t L = design.factors();
  const int J = data.J;

  const std::size_t first = (std::size_t{1} << J) - 1;
  std::vector<double> finest(data.mothers.begin() + static_cast<std::ptrdiff_t>(first * data.n),
                             data.mothers.end());
  for (double& v : finest) v = std::abs(v);
  double sigma = median(finest) / 0.6744897501960817;
  if (!(sigma > 0.0)) {
    double ss = 0.0;
    for (double v : finest) ss += v * v;
    sigma = std::sqrt(ss / static_cast<double>(finest.size()));
  }
  if (!(sigma > 0.0)) sigma = 1.0;
  hp.sigma0_sq = sigma * sigma;

  // energy of the coarse levels relative to the noise level
  const int coarse = std::min(J, 2);
  double energy = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < node_count(coarse); ++f)
    for (double v : data.node(f)) {
      energy += v * v;
      ++count;
    }
  hp.tau = std::max(1.0, energy / static_cast<double>(count) / hp.sigma0_sq);
  hp.upsilon.assign(L, hp.tau);
  hp.nu = 10.0;
  hp.alpha = 0.5;
  return hp;
}

FitResult mmle_fit(const WaveletData& data, const FactorDesign& design, const FitSpec& spec,
                   const HyperParams& init) {
  spec.validate();
  const std::size_t L = design.factors();
  init.validate(L);

  HyperParams base = init;
  if (spec.mode == FitMode::hybrid) {
    base.eta_kappa = spec.fixed_sparsity->first;
    base.gamma_kappa = spec.fixed_sparsity->second;
    base.validate(L);
  }

  FitResult out;
  out.hp = base;
  try {
    out.initial_log_marginal = log_marginal(base, data, design);
  } catch (const Error& e) {
    // a non-finite evidence surfaces as an internal error from the pass
    if (e.kind() != ErrorKind::internal) throw;
    out.initial_log_marginal = std::numeric_limits<double>::quiet_NaN();
  }
  require(std::isfinite(out.initial_log_marginal), ErrorKind::initialization,
          "log marginal likelihood is not finite at the initial hyperparameters");
  out.log_marginal = out.initial_log_marginal;
  if (spec.mode == FitMode::fixed) {
    out.evaluations = 1;
    out.converged = true;
    return out;
  }

  Layout layout;
  layout.alpha = spec.fit_alpha;
  layout.factors = L;
  layout.kappa = L > 0 && spec.mode == FitMode::full_eb;
  // the transforms need interior starting values
  HyperParams start = base;
  start.eta_rho = std::max(start.eta_rho, 1e-6);
  if (layout.kappa) start.eta_kappa = std::max(start.eta_kappa, 1e-6);
  const std::vector<double> x0 = layout.encode(start);

  auto objective = [&](std::span<const double> x) {
    try {
      return -log_marginal(layout.decode(x, base), data, design);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  NelderMeadOptions opts;
  opts.max_iters = spec.max_iters;
  opts.reltol = spec.tolerance;

  std::vector<NelderMeadResult> runs(spec.restarts);
  parallel_for(spec.restarts, [&](std::size_t r) {
    std::vector<double> x = x0;
    if (r > 0) {
      std::mt19937_64 rng = make_stream(spec.seed, r);
      std::normal_distribution<double> jitter(0.0, spec.jitter);
      for (double& v : x) v += jitter(rng);
    }
    runs[r] = nelder_mead(objective, x, opts);
  });

  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    out.evaluations += runs[r].evaluations;
    if (runs[r].value < runs[best].value) best = r;
  }
  const double fitted = -runs[best].value;
  if (std::isfinite(fitted) && fitted >= out.initial_log_marginal) {
    out.hp = layout.decode(runs[best].x, base);
    out.log_marginal = fitted;
  }
  out.iterations = runs[best].iterations;
  out.best_restart = best;
  out.converged = runs[best].converged;
  return out;
}

double prior_pjap(double eta, double gamma, int J, std::size_t /*factors*/) {
  require(J >= 0, ErrorKind::domain, "level count must be >= 0");
  require(std::isfinite(eta) && eta >= 0.0, ErrorKind::domain, "eta must be finite and >= 0");
  require(std::isfinite(gamma) && gamma > 0.0 && gamma < 1.0, ErrorKind::domain,
          "gamma must lie in (0, 1)");
  // log P(every node null) = log(1 - min{eta,1}) + sum_j 2^j log max{1 - eta 2^-j, 0}
  if (eta >= 1.0) return 1.0;
  double log_null = std::log1p(-eta);
  for (int j = 1; j <= J; ++j) {
    const double stay = eta * std::exp2(-j);
    if (stay >= 1.0) return 1.0;
    log_null += std::exp2(j) * std::log1p(-stay);
  }
  return -std::expm1(log_null);
}

double calibrate_sparsity(double target, double gamma, int J, std::size_t factors) {
  require(std::isfinite(target) && target > 0.0 && target < 1.0, ErrorKind::range,
          "prior joint alternative probability target " + std::to_string(target) +
              " is unreachable; it must lie strictly between 0 and 1");
  double lo = 0.0;
  double hi = 1.0;  // prior_pjap(1, ...) = 1
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = prior_pjap(mid, gamma, J, factors);
    if (std::abs(v - target) <= 1e-9 || hi - lo <= 1e-15) return mid;
    (v < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace nigmg
