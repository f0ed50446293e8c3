#include "nigmg/wavelet.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "nigmg/error.hpp"

namespace nigmg {

namespace {

// Daubechies least-asymmetric filter with 10 vanishing moments (20 taps),
// obtained by spectral factorization at 60-digit precision. Same root choice
// as the published "LA(20)" / sym10 tables.
constexpr double kLa10[20] = {
    0.0007701598091144598225786407,  0.00009563267072285273078450441,
    -0.008641299277022150260980649,  -0.001465382581304610513583442,
    0.04592723923109150858515887,    0.01160989390371131806352707,
    -0.1594942788849106094647825,    -0.07088053578323157228601765,
    0.4716906669384429100010319,     0.7695100370210979367838742,
    0.3838267610670763262565418,     -0.03553674047381958581615604,
    -0.03199005688242811392145285,   0.04999497207737515627662641,
    0.00576491203358114967199208,    -0.020354939812311110745488,
    -0.0008043589320164512960576106, 0.004593173585311791947469788,
    0.00005703608361849500681471888, -0.0004593294210046520401924679,
};

}  // namespace

FilterName parse_filter_name(std::string_view name) {
  if (name == "haar") return FilterName::haar;
  if (name == "la10") return FilterName::la10;
  fail(ErrorKind::domain, "unknown wavelet filter '" + std::string(name) + "'");
}

std::string_view to_string(FilterName name) {
  return name == FilterName::haar ? "haar" : "la10";
}

WaveletFilter make_filter(FilterName name) {
  WaveletFilter f;
  f.name = name;
  if (name == FilterName::haar) {
    const double h = 1.0 / std::sqrt(2.0);
    f.lowpass = {h, h};
  } else {
    f.lowpass.assign(std::begin(kLa10), std::end(kLa10));
  }
  const std::size_t L = f.lowpass.size();
  f.highpass.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    f.highpass[l] = sign * f.lowpass[L - 1 - l];
  }
  return f;
}

NodeIndex NodeIndex::from_flat(std::size_t i) {
  const int j = std::bit_width(i + 1) - 1;
  return {j, static_cast<int>(i + 1 - (std::size_t{1} << j))};
}

bool is_dyadic(std::size_t T) { return T >= 2 && std::has_single_bit(T); }

int levels_for_length(std::size_t T) {
  require(is_dyadic(T), ErrorKind::length,
          "signal length " + std::to_string(T) + " is not a power of two >= 2");
  return std::bit_width(T) - 2;
}

std::vector<NodeIndex> bottom_up_order(int J) {
  std::vector<NodeIndex> order;
  order.reserve(node_count(J));
  for (int j = J; j >= 0; --j)
    for (int k = 0; k < (1 << j); ++k) order.push_back({j, k});
  return order;
}

std::vector<NodeIndex> top_down_order(int J) {
  std::vector<NodeIndex> order;
  order.reserve(node_count(J));
  for (int j = 0; j <= J; ++j)
    for (int k = 0; k < (1 << j); ++k) order.push_back({j, k});
  return order;
}

CoefficientTree::CoefficientTree(int J, double father, std::vector<double> mothers)
    : J_(J), father_(father), mothers_(std::move(mothers)) {
  require(J >= 0 && mothers_.size() == node_count(J), ErrorKind::shape,
          "coefficient tree with J=" + std::to_string(J) + " needs " +
              std::to_string(node_count(J)) + " mothers, got " +
              std::to_string(mothers_.size()));
}

CoefficientTree forward_dwt(std::span<const double> signal, const WaveletFilter& filter) {
  const int J = levels_for_length(signal.size());
  for (double v : signal)
    require(std::isfinite(v), ErrorKind::domain, "signal contains a non-finite value");

  const auto& h = filter.lowpass;
  const auto& g = filter.highpass;
  const std::size_t L = h.size();

  CoefficientTree out(J);
  std::vector<double> approx(signal.begin(), signal.end());
  std::vector<double> next;
  for (int j = J; j >= 0; --j) {
    const std::size_t N = approx.size();
    const std::size_t half = N / 2;
    next.assign(half, 0.0);
    double* detail = out.mothers().data() + ((std::size_t{1} << j) - 1);
    for (std::size_t k = 0; k < half; ++k) {
      double a = 0.0;
      double d = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const double x = approx[(2 * k + l) % N];
        a += h[l] * x;
        d += g[l] * x;
      }
      next[k] = a;
      detail[k] = d;
    }
    approx.swap(next);
  }
  out.father() = approx[0];
  return out;
}

std::vector<double> inverse_dwt(const CoefficientTree& coeffs, const WaveletFilter& filter) {
  const int J = coeffs.levels();
  require(coeffs.mothers().size() == node_count(J), ErrorKind::shape,
          "coefficient tree size does not match its level count");

  const auto& h = filter.lowpass;
  const auto& g = filter.highpass;
  const std::size_t L = h.size();

  std::vector<double> approx{coeffs.father()};
  std::vector<double> next;
  for (int j = 0; j <= J; ++j) {
    const std::size_t half = approx.size();
    const std::size_t N = 2 * half;
    next.assign(N, 0.0);
    const double* detail = coeffs.mothers().data() + ((std::size_t{1} << j) - 1);
    for (std::size_t k = 0; k < half; ++k) {
      const double a = approx[k];
      const double d = detail[k];
      for (std::size_t l = 0; l < L; ++l) next[(2 * k + l) % N] += h[l] * a + g[l] * d;
    }
    approx.swap(next);
  }
  return approx;
}

WaveletData transform_rows(std::span<const std::vector<double>> rows,
                           const WaveletFilter& filter) {
  require(!rows.empty(), ErrorKind::shape, "no observations");
  const std::size_t T = rows.front().size();
  WaveletData out;
  out.J = levels_for_length(T);
  out.n = rows.size();
  out.mothers.assign(node_count(out.J) * out.n, 0.0);
  out.father.assign(out.n, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == T, ErrorKind::shape, "observations differ in length");
    const CoefficientTree c = forward_dwt(rows[i], filter);
    out.father[i] = c.father();
    const auto m = c.mothers();
    for (std::size_t node = 0; node < m.size(); ++node) out.mothers[node * out.n + i] = m[node];
  }
  return out;
}

}  // namespace nigmg
