#pragma once

// Orthonormal periodic DWT on dyadic-length signals and the location-scale
// tree indexing shared by the rest of the library.
//
// Mother coefficients are stored in heap order: node (j,k) lives at flat
// index 2^j - 1 + k, so the children of flat index i are 2i+1 and 2i+2 and
// its parent is (i-1)/2. A signal of length T = 2^(J+1) has T-1 mothers on
// levels 0..J plus a single father coefficient at the coarsest level.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace nigmg {

enum class FilterName { haar, la10 };

FilterName parse_filter_name(std::string_view name);
std::string_view to_string(FilterName name);

struct WaveletFilter {
  FilterName name = FilterName::la10;
  std::vector<double> lowpass;
  std::vector<double> highpass;  // g[l] = (-1)^l h[L-1-l]
};

WaveletFilter make_filter(FilterName name);

struct NodeIndex {
  int j = 0;
  int k = 0;

  std::size_t flat() const { return (std::size_t{1} << j) - 1 + static_cast<std::size_t>(k); }
  static NodeIndex from_flat(std::size_t i);

  NodeIndex parent() const { return {j - 1, k / 2}; }
  NodeIndex left_child() const { return {j + 1, 2 * k}; }
  NodeIndex right_child() const { return {j + 1, 2 * k + 1}; }

  friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

/// Number of mother nodes in a tree with levels 0..J.
inline std::size_t node_count(int J) { return (std::size_t{2} << J) - 1; }

/// J such that T = 2^(J+1); throws ErrorKind::length for non-dyadic T < 2.
int levels_for_length(std::size_t T);

bool is_dyadic(std::size_t T);

/// Finest level first (J..0), children always before parents.
std::vector<NodeIndex> bottom_up_order(int J);
/// Coarsest level first (0..J), parents always before children.
std::vector<NodeIndex> top_down_order(int J);

class CoefficientTree {
 public:
  CoefficientTree() = default;
  explicit CoefficientTree(int J) : J_(J), mothers_(node_count(J), 0.0) {}
  CoefficientTree(int J, double father, std::vector<double> mothers);

  int levels() const { return J_; }
  std::size_t signal_length() const { return mothers_.size() + 1; }

  double father() const { return father_; }
  double& father() { return father_; }

  double at(NodeIndex n) const { return mothers_[n.flat()]; }
  double& at(NodeIndex n) { return mothers_[n.flat()]; }

  std::span<const double> mothers() const { return mothers_; }
  std::span<double> mothers() { return mothers_; }

 private:
  int J_ = 0;
  double father_ = 0.0;
  std::vector<double> mothers_ = std::vector<double>(1, 0.0);
};

CoefficientTree forward_dwt(std::span<const double> signal, const WaveletFilter& filter);
std::vector<double> inverse_dwt(const CoefficientTree& coeffs, const WaveletFilter& filter);

/// Wavelet coefficients of n observations of equal length, node-major so
/// that each node's n values are contiguous.
struct WaveletData {
  int J = 0;
  std::size_t n = 0;
  std::vector<double> mothers;  // [flat_node * n + i]
  std::vector<double> father;   // [i]

  std::span<const double> node(std::size_t flat) const { return {mothers.data() + flat * n, n}; }
};

WaveletData transform_rows(std::span<const std::vector<double>> rows, const WaveletFilter& filter);

}  // namespace nigmg
