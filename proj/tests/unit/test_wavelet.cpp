#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "nigmg/error.hpp"
#include "nigmg/simbench.hpp"
#include "nigmg/wavelet.hpp"

using namespace nigmg;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::internal;
}

}  // namespace

TEST_CASE("haar constant signal") {
  const auto haar = make_filter(FilterName::haar);
  const std::vector<double> y{1, 1, 1, 1};
  const CoefficientTree c = forward_dwt(y, haar);
  CHECK(c.levels() == 1);
  CHECK(c.father() == doctest::Approx(2.0).epsilon(1e-15));
  for (double d : c.mothers()) CHECK(std::abs(d) < 1e-15);
}

TEST_CASE("haar alternating signal") {
  const auto haar = make_filter(FilterName::haar);
  const std::vector<double> y{1, -1, 1, -1};
  const CoefficientTree c = forward_dwt(y, haar);
  CHECK(std::abs(c.father()) < 1e-15);
  CHECK(std::abs(c.at({0, 0})) < 1e-15);
  CHECK(std::abs(c.at({1, 0})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(c.at({1, 1})) == doctest::Approx(std::sqrt(2.0)));
  double energy = c.father() * c.father();
  for (double d : c.mothers()) energy += d * d;
  CHECK(energy == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("haar inverse of constant tree") {
  const auto haar = make_filter(FilterName::haar);
  CoefficientTree c(1, 2.0, {0.0, 0.0, 0.0});
  const auto y = inverse_dwt(c, haar);
  REQUIRE(y.size() == 4);
  for (double v : y) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("la10 filter is orthonormal with vanishing moments") {
  const auto f = make_filter(FilterName::la10);
  REQUIRE(f.lowpass.size() == 20);
  CHECK(std::accumulate(f.lowpass.begin(), f.lowpass.end(), 0.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  for (int shift = 0; shift < 10; ++shift) {
    double dot = 0.0;
    for (std::size_t l = 0; l + 2 * shift < 20; ++l) dot += f.lowpass[l] * f.lowpass[l + 2 * shift];
    CHECK(dot == doctest::Approx(shift == 0 ? 1.0 : 0.0).epsilon(1e-13));
  }
  for (int m = 0; m < 10; ++m) {
    double moment = 0.0;
    for (std::size_t l = 0; l < 20; ++l) moment += std::pow(static_cast<double>(l), m) * f.highpass[l];
    CHECK(std::abs(moment) < 1e-6 * std::pow(20.0, m));
  }
}

// Reference values from an independent periodic Mallat implementation
// (numpy) with published sym10 taps.
TEST_CASE("la10 forward transform of a short signal") {
  std::vector<double> y(16);
  for (int i = 0; i < 16; ++i) y[i] = std::sin(i) + i / 16.0;
  const CoefficientTree c = forward_dwt(y, make_filter(FilterName::la10));
  const std::vector<double> expected{
      1.0072572144663257,   -1.3623343853515837,  -0.6739860205249254,  0.5849691080075896,
      -0.16826878209886464, -1.8285648740331402,  0.901418378742674,    -0.02063177631708335,
      -0.12483282178094388, 0.3010670059869758,   -1.0327371710276767,  0.31607414403681733,
      -0.1276521815126626,  -0.035425849520749314, 0.09425820664969808};
  CHECK(c.father() == doctest::Approx(2.3589218698363745).epsilon(1e-12));
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(c.mothers()[i] == doctest::Approx(expected[i]).epsilon(1e-11));
}

TEST_CASE("doppler round trip at T=1024 and clustering of large coefficients") {
  const auto f = make_filter(FilterName::la10);
  const auto y = test_function(TestFunctionName::doppler, 1024);
  const CoefficientTree c = forward_dwt(y, f);
  CHECK(max_abs_diff(inverse_dwt(c, f), y) < 1e-10);
  // doppler oscillates fastest near t = 0: on the finest level the left
  // tenth of the locations carries most of the energy
  const int J = c.levels();
  double left = 0.0, total = 0.0;
  for (int k = 0; k < (1 << J); ++k) {
    const double v = c.at({J, k}) * c.at({J, k});
    total += v;
    if (k < (1 << J) / 10) left += v;
  }
  CHECK(left > 0.5 * total);
}

TEST_CASE("random trees round trip through inverse then forward") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  for (auto name : {FilterName::haar, FilterName::la10}) {
    const auto f = make_filter(name);
    CoefficientTree c(5);
    c.father() = z(rng);
    for (double& v : c.mothers()) v = z(rng);
    const CoefficientTree back = forward_dwt(inverse_dwt(c, f), f);
    CHECK(std::abs(back.father() - c.father()) < 1e-10);
    for (std::size_t i = 0; i < c.mothers().size(); ++i)
      CHECK(std::abs(back.mothers()[i] - c.mothers()[i]) < 1e-10);
  }
}

TEST_CASE("tree topology") {
  CHECK(bottom_up_order(0) == std::vector<NodeIndex>{{0, 0}});
  const auto up = bottom_up_order(2);
  REQUIRE(up.size() == 7);
  for (std::size_t i = 0; i < 4; ++i) CHECK(up[i].j == 2);
  CHECK(up[4].j == 1);
  CHECK(up[5].j == 1);
  CHECK(up[6] == NodeIndex{0, 0});
  const auto down = top_down_order(2);
  CHECK(down.front() == NodeIndex{0, 0});
  CHECK(down.back().j == 2);
  CHECK(NodeIndex{2, 3}.parent() == NodeIndex{1, 1});
  CHECK(NodeIndex{1, 1}.left_child() == NodeIndex{2, 2});
  CHECK(NodeIndex{1, 1}.right_child() == NodeIndex{2, 3});
  for (std::size_t i = 0; i < node_count(4); ++i) CHECK(NodeIndex::from_flat(i).flat() == i);
}

TEST_CASE("length and shape errors") {
  const auto f = make_filter(FilterName::la10);
  CHECK(kind_of([&] { forward_dwt(std::vector<double>(12, 1.0), f); }) == ErrorKind::length);
  CHECK(kind_of([&] { forward_dwt(std::vector<double>(1, 1.0), f); }) == ErrorKind::length);
  CHECK(kind_of([&] { CoefficientTree(2, 0.0, std::vector<double>(5)); }) == ErrorKind::shape);
  CHECK(kind_of([] { parse_filter_name("db4"); }) == ErrorKind::domain);
  CHECK(levels_for_length(2) == 0);
  CHECK(levels_for_length(1024) == 9);
  CHECK_FALSE(is_dyadic(24));
}

TEST_CASE("transform_rows stores nodes contiguously") {
  const auto f = make_filter(FilterName::haar);
  const std::vector<std::vector<double>> rows{{1, 2, 3, 4}, {4, 3, 2, 1}};
  const WaveletData w = transform_rows(rows, f);
  CHECK(w.n == 2);
  CHECK(w.J == 1);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto c = forward_dwt(rows[i], f);
    CHECK(w.father[i] == doctest::Approx(c.father()));
    for (std::size_t node = 0; node < 3; ++node) CHECK(w.node(node)[i] == doctest::Approx(c.mothers()[node]));
  }
}
