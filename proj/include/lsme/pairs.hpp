#pragma once

#include <concepts>
#include <utility>
#include <vector>

#include "lsme/types.hpp"

namespace lsme {

// Anything that exposes a finite list of n-vectors. point(i) may return an
// Eigen expression; callers only evaluate it once per access.
template <typename R>
concept PointRange = requires(const R& r, Index i) {
  { r.size() } -> std::convertible_to<Index>;
  { r.dim() } -> std::convertible_to<Index>;
  r.point(i);
};

struct DensePoints {
  const std::vector<Eigen::VectorXd>* pts;
  Index size() const { return static_cast<Index>(pts->size()); }
  Index dim() const { return pts->empty() ? 0 : (*pts)[0].size(); }
  const Eigen::VectorXd& point(Index i) const { return (*pts)[static_cast<std::size_t>(i)]; }
};

struct MatrixRows {
  const Eigen::MatrixXd* rows;
  Index size() const { return rows->rows(); }
  Index dim() const { return rows->cols(); }
  auto point(Index i) const { return rows->row(i).transpose(); }
};

// Lazy view of the differences x_i - x_j named by a DifferenceSet; nothing
// is materialized up front.
struct DifferencePoints {
  const DifferenceSet* set;
  Index size() const { return set->size(); }
  Index dim() const { return set->parent->n(); }
  auto point(Index p) const {
    const auto& [i, j] = set->pairs[static_cast<std::size_t>(p)];
    return (set->parent->samples.row(i) - set->parent->samples.row(j)).transpose();
  }
};

// All C(m,2) unordered pairs; self-differences are excluded.
inline DifferenceSet difference_pairs(const Dataset& data) {
  const Index m = data.m();
  if (m < 2) throw ParameterError("difference_pairs: need at least 2 samples");
  DifferenceSet out;
  out.parent = &data;
  out.pairs.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) out.pairs.emplace_back(i, j);
  return out;
}

}  // namespace lsme
