#include "nigmg/grove.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nigmg/error.hpp"
#include "nigmg/logspace.hpp"

namespace nigmg {

namespace {

using LogMatrix = std::array<std::array<double, 2>, 2>;

LogMatrix log_of(const TransitionMatrix& t) {
  LogMatrix m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m[a][b] = safe_log(t(a, b));
  return m;
}

}  // namespace

PriorChains::PriorChains(const HyperParams& hp, std::size_t factors, int J)
    : L_(factors), K_(state_count(factors)) {
  require(J >= 0, ErrorKind::domain, "level count must be >= 0");
  for (int j = 0; j <= J; ++j) {
    log_rho_.push_back(log_of(transition_matrix(j, hp.eta_rho, hp.gamma_rho)));
    if (L_ > 0) log_kappa_.push_back(log_of(transition_matrix(j, hp.eta_kappa, hp.gamma_kappa)));
  }
}

const LogMatrix& PriorChains::log_matrix(int j, std::size_t bit) const {
  return bit == L_ ? log_rho_[static_cast<std::size_t>(j)] : log_kappa_[static_cast<std::size_t>(j)];
}

double PriorChains::log_transition(int j, JointState a, JointState b) const {
  double acc = 0.0;
  for (std::size_t q = 0; q <= L_; ++q) acc += log_matrix(j, q)[(a >> q) & 1u][(b >> q) & 1u];
  return acc;
}

double PriorChains::log_initial_factors(JointState b) const {
  double acc = 0.0;
  for (std::size_t q = 0; q < L_; ++q) acc += log_matrix(0, q)[0][(b >> q) & 1u];
  return acc;
}

void PriorChains::apply(int j, std::span<double> v) const {
  for (std::size_t q = 0; q <= L_; ++q) {
    const LogMatrix& m = log_matrix(j, q);
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t x = 0; x < K_; ++x) {
      if (x & stride) continue;
      const double v0 = v[x];
      const double v1 = v[x | stride];
      v[x] = log_add(m[0][0] + v0, m[0][1] + v1);
      v[x | stride] = log_add(m[1][0] + v0, m[1][1] + v1);
    }
  }
}

void PriorChains::apply_transposed(int j, std::span<double> v) const {
  for (std::size_t q = 0; q <= L_; ++q) {
    const LogMatrix& m = log_matrix(j, q);
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t x = 0; x < K_; ++x) {
      if (x & stride) continue;
      const double v0 = v[x];
      const double v1 = v[x | stride];
      v[x] = log_add(m[0][0] + v0, m[1][0] + v1);
      v[x | stride] = log_add(m[0][1] + v0, m[1][1] + v1);
    }
  }
}

PosteriorGrove::PosteriorGrove(int J, std::size_t L, const HyperParams& hp)
    : J_(J), L_(L), K_(state_count(L)), hp_(hp), prior_(hp, L, J) {}

void PosteriorGrove::run(std::vector<double> log_m) {
  const std::size_t N = node_count(J_);
  require(log_m.size() == N * K_, ErrorKind::shape,
          "log-likelihood table has " + std::to_string(log_m.size()) + " entries, expected " +
              std::to_string(N * K_));
  log_phi_ = std::move(log_m);
  log_xi_.assign(N * K_, 0.0);
  std::vector<double> v(K_);
  for (const NodeIndex n : bottom_up_order(J_)) {
    const std::size_t f = n.flat();
    double* phi = log_phi_.data() + f * K_;
    if (n.j < J_) {
      const double* xl = log_xi_.data() + n.left_child().flat() * K_;
      const double* xr = log_xi_.data() + n.right_child().flat() * K_;
      for (std::size_t x = 0; x < K_; ++x) phi[x] += xl[x] + xr[x];
    }
    std::copy(phi, phi + K_, v.begin());
    prior_.apply(n.j, v);
    double* xi = log_xi_.data() + f * K_;
    if (n.j == 0)
      std::fill(xi, xi + K_, v[0]);
    else
      std::copy(v.begin(), v.end(), xi);
  }
  log_evidence_ = log_xi_[0];
  require(std::isfinite(log_evidence_), ErrorKind::internal, "log evidence is not finite");
}

PosteriorGrove upward_pass_loglik(int J, std::size_t factors, const HyperParams& hp,
                                  std::vector<double> log_m) {
  PosteriorGrove g(J, factors, hp);
  g.run(std::move(log_m));
  return g;
}

PosteriorGrove upward_pass(const WaveletData& data, const FactorDesign& design,
                           const HyperParams& hp) {
  require(data.n == design.observations(), ErrorKind::shape,
          "data has " + std::to_string(data.n) + " observations, design has " +
              std::to_string(design.observations()));
  require(data.mothers.size() == node_count(data.J) * data.n, ErrorKind::shape,
          "wavelet data does not cover every mother node");
  const std::size_t L = design.factors();
  hp.validate(L);

  PosteriorGrove g(data.J, L, hp);
  g.model_.emplace(design, hp, data.J);
  const NodeModel& model = *g.model_;
  const std::size_t N = node_count(data.J);
  const std::size_t K = g.K_;

  std::vector<double> log_m(N * K);
  g.stats_.resize(N);
  for (std::size_t f = 0; f < N; ++f) {
    const int j = NodeIndex::from_flat(f).j;
    g.stats_[f] = model.stats(data.node(f));
    for (JointState x = 0; x < K; ++x) log_m[f * K + x] = model.log_marginal(g.stats_[f], x, j);
  }
  g.run(std::move(log_m));

  g.father_model_.emplace(design, hp, 0, true);
  g.father_stats_ = g.father_model_->stats(data.father);
  std::vector<double> w(K, kNegInf);
  for (JointState x = 0; x < K; ++x)
    if (baseline_bit(x, L))
      w[x] = g.prior_.log_initial_factors(x) + g.father_model_->log_marginal(g.father_stats_, x, 0);
  const double total = log_sum_exp(w);
  g.father_dist_.resize(K);
  for (JointState x = 0; x < K; ++x) g.father_dist_[x] = std::exp(w[x] - total);
  g.has_data_ = true;
  return g;
}

const NodeModel& PosteriorGrove::model() const {
  require(has_data_, ErrorKind::domain, "grove was built from likelihoods only");
  return *model_;
}

const NodeStats& PosteriorGrove::node_stats(NodeIndex n) const {
  require(has_data_, ErrorKind::domain, "grove was built from likelihoods only");
  return stats_[n.flat()];
}

NigConditional PosteriorGrove::conditional(NodeIndex n, JointState x) const {
  return model().conditional(node_stats(n), x, n.j);
}

const NodeModel& PosteriorGrove::father_model() const {
  require(has_data_, ErrorKind::domain, "grove was built from likelihoods only");
  return *father_model_;
}

NigConditional PosteriorGrove::father_conditional(JointState x) const {
  require(baseline_bit(x, L_), ErrorKind::domain, "the father intercept is always in the model");
  return father_model().conditional(father_stats_, x, 0);
}

double PosteriorGrove::posterior_transition(NodeIndex child, JointState parent,
                                            JointState state) const {
  require(child.j >= 1, ErrorKind::domain, "the root has no parent");
  return std::exp(prior_.log_transition(child.j, parent, state) + log_phi(child, state) -
                  log_xi(child, parent));
}

std::vector<double> PosteriorGrove::posterior_transition_row(NodeIndex child,
                                                             JointState parent) const {
  std::vector<double> row(K_);
  for (JointState x = 0; x < K_; ++x) row[x] = posterior_transition(child, parent, x);
  return row;
}

std::vector<double> PosteriorGrove::root_distribution() const {
  std::vector<double> d(K_);
  for (JointState x = 0; x < K_; ++x)
    d[x] = std::exp(prior_.log_initial(x) + log_phi_[x] - log_evidence_);
  return d;
}

double PosteriorMarginals::pmap(NodeIndex n, std::size_t factor) const {
  require(factor < L_, ErrorKind::domain, "factor index out of range");
  double p = 0.0;
  const double* row = probs_.data() + n.flat() * K_;
  for (JointState x = 0; x < K_; ++x)
    if (factor_bit(x, L_, factor)) p += row[x];
  return p;
}

double PosteriorMarginals::baseline(NodeIndex n) const {
  double p = 0.0;
  const double* row = probs_.data() + n.flat() * K_;
  for (JointState x = 0; x < K_; ++x)
    if (baseline_bit(x, L_)) p += row[x];
  return p;
}

std::vector<double> PosteriorMarginals::pmap_table(std::size_t factor) const {
  std::vector<double> t(node_count(J_));
  for (std::size_t f = 0; f < t.size(); ++f) t[f] = pmap(NodeIndex::from_flat(f), factor);
  return t;
}

std::vector<double> PosteriorMarginals::baseline_table() const {
  std::vector<double> t(node_count(J_));
  for (std::size_t f = 0; f < t.size(); ++f) t[f] = baseline(NodeIndex::from_flat(f));
  return t;
}

PosteriorMarginals downward_marginals(const PosteriorGrove& g) {
  const std::size_t K = g.states();
  const std::size_t N = g.nodes();
  std::vector<double> log_marg(N * K);
  for (JointState x = 0; x < K; ++x)
    log_marg[x] = g.prior().log_initial(x) + g.log_phi({0, 0}, x) - g.log_evidence();

  std::vector<double> w(K);
  for (std::size_t f = 1; f < N; ++f) {
    const NodeIndex n = NodeIndex::from_flat(f);
    const std::size_t parent = n.parent().flat();
    for (JointState a = 0; a < K; ++a) w[a] = log_marg[parent * K + a] - g.log_xi(n, a);
    g.prior().apply_transposed(n.j, w);
    for (JointState b = 0; b < K; ++b) log_marg[f * K + b] = g.log_phi(n, b) + w[b];
  }
  for (double& v : log_marg) v = std::exp(v);
  return PosteriorMarginals(g.levels(), g.factors(), std::move(log_marg));
}

double log_pjnp(const PosteriorGrove& g, std::size_t factor) {
  const std::size_t L = g.factors();
  require(factor < L, ErrorKind::domain,
          "factor index " + std::to_string(factor) + " out of range");
  const std::size_t K = g.states();
  // psi[f][a]: log P(R_l = 0 on the subtree of f | parent state a with r_l = 0, data)
  std::vector<double> psi(g.nodes() * K, kNegInf);
  std::vector<double> v(K);
  double result = kNegInf;
  for (const NodeIndex n : bottom_up_order(g.levels())) {
    for (JointState b = 0; b < K; ++b) {
      if (factor_bit(b, L, factor)) {
        v[b] = kNegInf;
        continue;
      }
      double acc = g.log_phi(n, b);
      if (n.j < g.levels())
        acc += psi[n.left_child().flat() * K + b] + psi[n.right_child().flat() * K + b];
      v[b] = acc;
    }
    g.prior().apply(n.j, v);
    if (n.j == 0) {
      result = v[0] - g.log_evidence();
    } else {
      double* out = psi.data() + n.flat() * K;
      for (JointState a = 0; a < K; ++a) out[a] = v[a] - g.log_xi(n, a);
    }
  }
  return std::min(result, 0.0);
}

double pjap(const PosteriorGrove& g, std::size_t factor) {
  return -std::expm1(log_pjnp(g, factor));
}

}  // namespace nigmg
