#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <vector>

#include "lsme/rng.hpp"
#include "lsme/types.hpp"

namespace lsme {

// Undirected graph on [m] with bitset adjacency rows; common-neighbor
// counts are word-parallel popcounts.
class PairGraph {
 public:
  explicit PairGraph(Index m) : m_(m), words_((m + 63) / 64), bits_(static_cast<std::size_t>(m * words_), 0) {
    if (m < 0) throw ParameterError("PairGraph: negative vertex count");
  }

  Index vertex_count() const { return m_; }

  void add_edge(Index i, Index j) {
    if (i == j) throw ParameterError("PairGraph: self-loops are not allowed");
    set_bit(i, j);
    set_bit(j, i);
  }

  bool has_edge(Index i, Index j) const {
    if (i == j) return false;
    return (row(i)[static_cast<std::size_t>(j / 64)] >> (j % 64)) & 1u;
  }

  Index degree(Index i) const {
    Index c = 0;
    const std::uint64_t* r = row(i);
    for (Index w = 0; w < words_; ++w) c += std::popcount(r[static_cast<std::size_t>(w)]);
    return c;
  }

  Index common_neighbors(Index i, Index j) const {
    Index c = 0;
    const std::uint64_t* a = row(i);
    const std::uint64_t* b = row(j);
    for (Index w = 0; w < words_; ++w)
      c += std::popcount(a[static_cast<std::size_t>(w)] & b[static_cast<std::size_t>(w)]);
    return c;
  }

  std::vector<Index> neighbors(Index i) const {
    std::vector<Index> out;
    for (Index j = 0; j < m_; ++j)
      if (has_edge(i, j)) out.push_back(j);
    return out;
  }

  std::vector<std::pair<Index, Index>> edges() const {
    std::vector<std::pair<Index, Index>> out;
    for (Index i = 0; i < m_; ++i)
      for (Index j = i + 1; j < m_; ++j)
        if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
  }

  Index edge_count() const {
    Index total = 0;
    for (Index i = 0; i < m_; ++i) total += degree(i);
    return total / 2;
  }

 private:
  const std::uint64_t* row(Index i) const { return bits_.data() + static_cast<std::size_t>(i * words_); }
  void set_bit(Index i, Index j) {
    bits_[static_cast<std::size_t>(i * words_ + j / 64)] |= (std::uint64_t{1} << (j % 64));
  }

  Index m_;
  Index words_;
  std::vector<std::uint64_t> bits_;
};

// Graph on the parent's m vertices whose edges are the retained pairs.
inline PairGraph build_pair_graph(const DifferenceSet& t_prime) {
  PairGraph g(t_prime.parent ? t_prime.parent->m() : 0);
  for (const auto& [i, j] : t_prime.pairs) g.add_edge(i, j);
  return g;
}

// Overlap graph R_gamma(G): edge {x,y} iff the common-neighbor count is
// >= gamma * m (inclusive). x and y need not be adjacent in G.
inline PairGraph overlap_graph(const PairGraph& g, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("overlap_graph: gamma must be positive");
  const Index m = g.vertex_count();
  PairGraph out(m);
  const double bar = gamma * static_cast<double>(m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      if (static_cast<double>(g.common_neighbors(i, j)) >= bar) out.add_edge(i, j);
  return out;
}

// Repeatedly removes the lowest-index vertex of W' with fewer than 2|W|/3
// neighbors inside W', with |W| the ORIGINAL size. May return the empty set.
inline std::vector<Index> prune(const PairGraph& g, const std::vector<Index>& w) {
  if (w.empty()) throw ParameterError("prune: W must be nonempty");
  const double bar = 2.0 * static_cast<double>(w.size()) / 3.0;
  std::vector<Index> cur = w;
  std::sort(cur.begin(), cur.end());
  bool removed = true;
  while (removed && !cur.empty()) {
    removed = false;
    for (std::size_t a = 0; a < cur.size(); ++a) {
      Index inside = 0;
      for (Index y : cur) inside += g.has_edge(cur[a], y);
      if (static_cast<double>(inside) < bar) {
        cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(a));
        removed = true;
        break;
      }
    }
  }
  return cur;
}

struct RoundingOptions {
  double overlap_constant = 4608.0;  // denominator in delta = alpha^3 / C
};

// Count of unordered W-pairs that are not adjacent in g.
inline Index non_adjacent_pairs(const PairGraph& g, const std::vector<Index>& w) {
  Index cnt = 0;
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = a + 1; b < w.size(); ++b) cnt += !g.has_edge(w[a], w[b]);
  return cnt;
}

// Randomized rounding: draw a vertex, take its neighborhood, prune it into
// a clique of the overlap graph, and return the clique mean. FAIL (nullopt)
// is a normal outcome.
inline std::optional<Eigen::VectorXd> rounding(const Dataset& data, const PairGraph& g, double alpha,
                                               std::uint64_t seed, const RoundingOptions& opt = {}) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("rounding: alpha must lie in (0, 1/2)");
  const Index m = g.vertex_count();
  if (m == 0 || data.m() != m) throw ParameterError("rounding: graph/dataset size mismatch");

  Rng rng(seed);
  const Index x = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(m)));
  const std::vector<Index> w = g.neighbors(x);

  const double delta = alpha * alpha * alpha / opt.overlap_constant;
  if (static_cast<double>(w.size()) <= (alpha / 4.0) * static_cast<double>(m)) return std::nullopt;

  const PairGraph overlap = overlap_graph(g, delta);
  const Index bad = non_adjacent_pairs(overlap, w);
  if (static_cast<double>(bad) > (8.0 * delta / alpha) * static_cast<double>(m) * static_cast<double>(m))
    return std::nullopt;

  const std::vector<Index> kept = prune(overlap, w);
  if (kept.empty()) return std::nullopt;

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(data.n());
  for (Index v : kept) mean += data.samples.row(v).transpose();
  mean /= static_cast<double>(kept.size());
  return mean;
}

// (1/m^2) * sum over unordered edges {i,j} of <v, x_i - x_j>^t.
inline double graph_moment(const PairGraph& g, const Dataset& data, const SparseDirection& v, int t) {
  if (t < 2 || t % 2 != 0) throw ParameterError("graph_moment: t must be even and >= 2");
  const Index m = g.vertex_count();
  if (data.m() != m) throw ParameterError("graph_moment: graph/dataset size mismatch");
  double sum = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      if (g.has_edge(i, j)) sum += std::pow(v.dot_diff(data.samples, i, j), t);
  return sum / (static_cast<double>(m) * static_cast<double>(m));
}

}  // namespace lsme
