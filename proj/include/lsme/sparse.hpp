#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lsme/types.hpp"

namespace lsme {

// Number of size-k supports in n coordinates, as a double (may overflow to inf).
inline double support_count(Index n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

// Visits all size-k subsets of [0, n) in lexicographic order.
template <typename F>
void for_each_support(Index n, int k, F&& f) {
  std::vector<Index> sup(static_cast<std::size_t>(k));
  std::iota(sup.begin(), sup.end(), Index{0});
  for (;;) {
    f(const_cast<const std::vector<Index>&>(sup));
    int i = k - 1;
    while (i >= 0 && sup[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++sup[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      sup[static_cast<std::size_t>(j)] = sup[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Indices of the k largest-magnitude entries; ties go to the lowest index.
inline std::vector<Index> top_k_indices(const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto cmp = [&x](Index a, Index b) {
    const double fa = std::abs(x[a]), fb = std::abs(x[b]);
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + k - 1, idx.end(), cmp);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

// Truncation to the k largest-magnitude coordinates.
inline Eigen::VectorXd hk_truncate(const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
  if (k < 1 || k > x.size()) throw ParameterError("hk_truncate: k out of range");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Index i : top_k_indices(x, k)) out[i] = x[i];
  return out;
}

// (2,k)-norm: l2 norm of the k largest-magnitude entries, which equals the
// maximum correlation with any k-sparse unit vector.
inline double two_k_norm(const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
  if (k < 1 || k > x.size()) throw ParameterError("two_k_norm: k out of range");
  double s = 0.0;
  for (Index i : top_k_indices(x, k)) s += x[i] * x[i];
  return std::sqrt(s);
}

}  // namespace lsme
