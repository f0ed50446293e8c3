#include "nigmg/nodemodel.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "nigmg/error.hpp"
#include "nigmg/logspace.hpp"

namespace nigmg {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_sparsity(double eta, double gamma, const char* which) {
  require(std::isfinite(eta) && eta >= 0.0, ErrorKind::domain,
          std::string(which) + ": eta must be finite and >= 0");
  require(std::isfinite(gamma) && gamma > 0.0 && gamma < 1.0, ErrorKind::domain,
          std::string(which) + ": gamma must lie in (0, 1)");
}

// Clamp the residual quadratic form at zero when it is negative only through
// floating-point cancellation.
double clamp_upsilon(double upsilon, double sumsq) {
  if (upsilon >= 0.0) return upsilon;
  require(-upsilon <= 1e-12 * sumsq + 1e-300, ErrorKind::internal,
          "negative residual sum of squares in NIG update");
  return 0.0;
}

double log_marginal_from(double upsilon, double half_log_det_ratio, std::size_t n,
                         const HyperParams& hp) {
  const double prior_rate = hp.nu * hp.sigma0_sq;
  const double half_n = 0.5 * static_cast<double>(n);
  return log_gamma_ratio(hp.nu + 1.0, half_n) - half_n * std::log(2.0 * std::numbers::pi) +
         half_log_det_ratio - (hp.nu + 1.0) * std::log1p(upsilon / prior_rate) -
         half_n * std::log(prior_rate + upsilon);
}

}  // namespace

double log_gamma_ratio(double x, double a) {
  if (a == 0.0) return 0.0;
  if (x < 1e4) return std::lgamma(x + a) - std::lgamma(x);
  // Stirling series difference; the truncation error is O(x^-5).
  const double y = x + a;
  auto tail = [](double t) { return 1.0 / (12.0 * t) - 1.0 / (360.0 * t * t * t); };
  return (x - 0.5) * std::log1p(a / x) + a * std::log(y) - a + tail(y) - tail(x);
}

void HyperParams::validate(std::size_t factors) const {
  require(positive(alpha), ErrorKind::domain, "alpha must be > 0");
  require(positive(tau), ErrorKind::domain, "tau must be > 0");
  require(positive(sigma0_sq), ErrorKind::domain, "sigma0_sq must be > 0");
  require(positive(nu), ErrorKind::domain, "nu must be > 0");
  require(upsilon.size() == factors, ErrorKind::domain,
          "expected " + std::to_string(factors) + " upsilon values, got " +
              std::to_string(upsilon.size()));
  for (double u : upsilon) require(positive(u), ErrorKind::domain, "upsilon must be > 0");
  check_sparsity(eta_rho, gamma_rho, "baseline tree");
  if (factors > 0) check_sparsity(eta_kappa, gamma_kappa, "factor tree");
}

TransitionMatrix transition_matrix(int j, double eta, double gamma) {
  require(j >= 0, ErrorKind::domain, "level must be >= 0");
  check_sparsity(eta, gamma, "transition");
  const double on = std::min(eta * std::exp2(-j), 1.0);
  TransitionMatrix t;
  t.p[0] = {std::max(1.0 - eta * std::exp2(-j), 0.0), on};
  t.p[1] = {1.0 - gamma, gamma};
  return t;
}

std::array<double, 2> initial_probabilities(double eta) {
  require(std::isfinite(eta) && eta >= 0.0, ErrorKind::domain, "eta must be finite and >= 0");
  const double on = std::min(eta, 1.0);
  return {1.0 - on, on};
}

JointState make_state(bool s, std::span<const int> r) {
  JointState x = s ? 1u : 0u;
  for (int bit : r) x = (x << 1) | (bit ? 1u : 0u);
  return x;
}

FactorDesign::FactorDesign(std::vector<int> levels, std::vector<std::vector<int>> labels)
    : levels_(std::move(levels)), labels_(std::move(labels)) {
  require(levels_.size() == labels_.size(), ErrorKind::design,
          "one label column is required per factor");
  require(!levels_.empty(), ErrorKind::design, "use FactorDesign::replicates for L = 0");
  n_ = labels_.front().size();
  require(n_ > 0, ErrorKind::design, "design has no observations");
  offsets_.resize(levels_.size());
  p_ = 1;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    require(levels_[l] >= 2, ErrorKind::design,
            "factor " + std::to_string(l + 1) + " has fewer than two levels");
    require(labels_[l].size() == n_, ErrorKind::design, "label columns differ in length");
    for (int g : labels_[l])
      require(g >= 0 && g < levels_[l], ErrorKind::design,
              "label out of range for factor " + std::to_string(l + 1));
    offsets_[l] = p_;
    p_ += static_cast<std::size_t>(levels_[l] - 1);
  }
  const Eigen::MatrixXd X = design_matrix();
  gram_ = X.transpose() * X;
}

FactorDesign FactorDesign::replicates(std::size_t n) {
  require(n > 0, ErrorKind::design, "need at least one observation");
  FactorDesign d;
  d.n_ = n;
  d.p_ = 1;
  d.gram_ = Eigen::MatrixXd::Constant(1, 1, static_cast<double>(n));
  return d;
}

Eigen::MatrixXd FactorDesign::design_matrix() const {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(p_));
  X.col(0).setOnes();
  for (std::size_t l = 0; l < levels_.size(); ++l)
    for (std::size_t i = 0; i < n_; ++i)
      if (const int g = labels_[l][i]; g > 0)
        X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(column(l, g))) = 1.0;
  return X;
}

Eigen::VectorXd FactorDesign::cross(std::span<const double> d) const {
  require(d.size() == n_, ErrorKind::shape, "node vector length does not match design");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
  double total = 0.0;
  for (double v : d) total += v;
  b(0) = total;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const auto& lab = labels_[l];
    for (std::size_t i = 0; i < n_; ++i)
      if (lab[i] > 0) b(static_cast<Eigen::Index>(column(l, lab[i]))) += d[i];
  }
  return b;
}

std::vector<std::size_t> FactorDesign::active_columns(JointState x) const {
  const std::size_t L = factors();
  std::vector<std::size_t> cols;
  if (baseline_bit(x, L)) cols.push_back(0);
  for (std::size_t l = 0; l < L; ++l)
    if (factor_bit(x, L, l))
      for (int g = 1; g < levels_[l]; ++g) cols.push_back(column(l, g));
  return cols;
}

double log_marginal_mt(double dbar, double sumsq, std::size_t n, int s, int j,
                       const HyperParams& hp) {
  require(n >= 1, ErrorKind::domain, "need n >= 1");
  const double nn = static_cast<double>(n);
  require(sumsq >= nn * dbar * dbar * (1.0 - 1e-12), ErrorKind::domain,
          "sum of squares is smaller than n * mean^2");
  const double prec = 1.0 / hp.tau_at(j);
  double upsilon = 0.5 * sumsq;
  double ratio = 0.0;
  if (s != 0) {
    upsilon -= 0.5 * (nn * dbar) * (nn * dbar) / (nn + prec);
    ratio = 0.5 * (std::log(prec) - std::log(nn + prec));
  }
  upsilon = clamp_upsilon(upsilon, sumsq);
  return log_marginal_from(upsilon, ratio, n, hp);
}

NodeModel::NodeModel(const FactorDesign& design, const HyperParams& hp, int J, bool flat_intercept)
    : hp_(hp),
      n_(design.observations()),
      L_(design.factors()),
      p_(design.coefficient_count()),
      K_(state_count(design.factors())),
      flat_intercept_(flat_intercept),
      design_(design) {
  hp_.validate(L_);
  require(J >= 0, ErrorKind::domain, "level count must be >= 0");
  log_const_ = log_gamma_ratio(hp_.nu + 1.0, 0.5 * static_cast<double>(n_)) -
               0.5 * static_cast<double>(n_) * std::log(2.0 * std::numbers::pi);

  // Prior precision of every coefficient at level j.
  std::vector<double> prior_prec(p_);
  blocks_.resize(static_cast<std::size_t>(J + 1) * K_);
  const Eigen::MatrixXd& G = design_.gram();
  for (int j = 0; j <= J; ++j) {
    prior_prec[0] = flat_intercept ? 0.0 : 1.0 / hp_.tau_at(j);
    for (std::size_t l = 0; l < L_; ++l)
      for (int g = 1; g < design_.levels(l); ++g)
        prior_prec[design_.column(l, g)] = 1.0 / hp_.upsilon_at(l, j);

    for (JointState x = 0; x < K_; ++x) {
      Block& b = blocks_[static_cast<std::size_t>(j) * K_ + x];
      b.active = design_.active_columns(x);
      const auto m = static_cast<Eigen::Index>(b.active.size());
      if (m == 0) continue;
      Eigen::MatrixXd A(m, m);
      double log_det_prior = 0.0;
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index c = 0; c < m; ++c)
          A(a, c) = G(static_cast<Eigen::Index>(b.active[a]), static_cast<Eigen::Index>(b.active[c]));
        A(a, a) += prior_prec[b.active[a]];
        // a flat prior contributes an improper constant shared by all states
        if (prior_prec[b.active[a]] > 0.0) log_det_prior += std::log(prior_prec[b.active[a]]);
      }
      b.chol.compute(A);
      require(b.chol.info() == Eigen::Success, ErrorKind::internal,
              "posterior precision is not positive definite");
      double log_det_post = 0.0;
      const auto& Lm = b.chol.matrixLLT();
      for (Eigen::Index a = 0; a < m; ++a) log_det_post += 2.0 * std::log(Lm(a, a));
      b.half_log_det_ratio = 0.5 * (log_det_prior - log_det_post);
    }
  }
}

double NodeModel::ig_shape() const { return hp_.nu + 1.0 + 0.5 * static_cast<double>(n_); }

NodeStats NodeModel::stats(std::span<const double> d) const {
  NodeStats st;
  st.cross = design_.cross(d);
  double ss = 0.0;
  for (double v : d) ss += v * v;
  st.sumsq = ss;
  return st;
}

double NodeModel::upsilon_term(const NodeStats& st, const Block& b,
                               Eigen::VectorXd* mean_active) const {
  const auto m = static_cast<Eigen::Index>(b.active.size());
  if (m == 0) {
    if (mean_active) mean_active->resize(0);
    return 0.5 * st.sumsq;
  }
  Eigen::VectorXd rhs(m);
  for (Eigen::Index a = 0; a < m; ++a) rhs(a) = st.cross(static_cast<Eigen::Index>(b.active[a]));
  b.chol.matrixL().solveInPlace(rhs);  // rhs <- L^{-1} X_a'd
  const double quad = rhs.squaredNorm();
  if (mean_active) {
    b.chol.matrixU().solveInPlace(rhs);
    *mean_active = std::move(rhs);
  }
  return clamp_upsilon(0.5 * (st.sumsq - quad), st.sumsq);
}

double NodeModel::log_marginal(const NodeStats& st, JointState x, int j) const {
  const Block& b = block(j, x);
  const double ups = upsilon_term(st, b, nullptr);
  const double prior_rate = hp_.nu * hp_.sigma0_sq;
  const double half_n = 0.5 * static_cast<double>(n_);
  return log_const_ + b.half_log_det_ratio - (hp_.nu + 1.0) * std::log1p(ups / prior_rate) -
         half_n * std::log(prior_rate + ups);
}

NigConditional NodeModel::conditional(const NodeStats& st, JointState x, int j) const {
  const Block& b = block(j, x);
  Eigen::VectorXd mean_active;
  const double ups = upsilon_term(st, b, &mean_active);

  NigConditional c;
  c.ig_shape = ig_shape();
  c.ig_rate = hp_.nu * hp_.sigma0_sq + ups;
  const auto p = static_cast<Eigen::Index>(p_);
  c.mean = Eigen::VectorXd::Zero(p);
  c.mask.assign(p_, false);
  c.precision = Eigen::MatrixXd::Zero(p, p);
  c.precision(0, 0) = flat_intercept_ ? 0.0 : 1.0 / hp_.tau_at(j);
  for (std::size_t l = 0; l < L_; ++l)
    for (int g = 1; g < design_.levels(l); ++g) {
      const auto col = static_cast<Eigen::Index>(design_.column(l, g));
      c.precision(col, col) = 1.0 / hp_.upsilon_at(l, j);
    }
  const Eigen::MatrixXd& G = design_.gram();
  for (std::size_t a = 0; a < b.active.size(); ++a) {
    const auto ia = static_cast<Eigen::Index>(b.active[a]);
    c.mask[b.active[a]] = true;
    c.mean(ia) = mean_active(static_cast<Eigen::Index>(a));
    for (std::size_t e = 0; e < b.active.size(); ++e) {
      const auto ie = static_cast<Eigen::Index>(b.active[e]);
      c.precision(ia, ie) += G(ia, ie);
    }
  }
  return c;
}

Eigen::VectorXd NodeModel::mean(const NodeStats& st, JointState x, int j) const {
  const Block& b = block(j, x);
  Eigen::VectorXd mean_active;
  upsilon_term(st, b, &mean_active);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
  for (std::size_t a = 0; a < b.active.size(); ++a)
    out(static_cast<Eigen::Index>(b.active[a])) = mean_active(static_cast<Eigen::Index>(a));
  return out;
}

void NodeModel::draw(const NodeStats& st, JointState x, int j, double gamma_variate,
                     std::span<const double> z, double& sigma_sq, std::span<double> theta) const {
  const Block& b = block(j, x);
  Eigen::VectorXd mean_active;
  const double ups = upsilon_term(st, b, &mean_active);
  sigma_sq = (hp_.nu * hp_.sigma0_sq + ups) / gamma_variate;
  std::fill(theta.begin(), theta.end(), 0.0);
  const auto m = static_cast<Eigen::Index>(b.active.size());
  if (m == 0) return;
  Eigen::VectorXd e(m);
  for (Eigen::Index a = 0; a < m; ++a) e(a) = z[static_cast<std::size_t>(a)];
  b.chol.matrixU().solveInPlace(e);  // cov (L L')^{-1}
  const double sd = std::sqrt(sigma_sq);
  for (Eigen::Index a = 0; a < m; ++a) theta[b.active[a]] = mean_active(a) + sd * e(a);
}

double log_marginal_mg(std::span<const double> d, const FactorDesign& design, JointState x,
                       int j, const HyperParams& hp) {
  const NodeModel model(design, hp, j);
  return model.log_marginal(model.stats(d), x, j);
}

NigConditional nig_conditional(std::span<const double> d, const FactorDesign& design,
                               JointState x, int j, const HyperParams& hp) {
  const NodeModel model(design, hp, j);
  return model.conditional(model.stats(d), x, j);
}

}  // namespace nigmg
