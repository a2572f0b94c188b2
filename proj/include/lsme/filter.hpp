#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "lsme/oracle.hpp"
#include "lsme/pairs.hpp"
#include "lsme/rng.hpp"
#include "lsme/types.hpp"

namespace lsme {

// Effective moment bound for difference sets: composes the empirical-moment
// slack (8M) with the pairwise-difference triangle factor 2^t. The filter
// threshold is 6 * M_eff * |T|.
inline double effective_moment_bound(const MomentParams& params) {
  return std::pow(2.0, params.t) * 8.0 * params.moment_bound;
}

struct FilterOptions {
  OracleOptions oracle;
  double m_eff_override = -1.0;       // <= 0: effective_moment_bound(params)
  long long soft_iteration_cap = -1;  // <= 0: no cap beyond the |T| guarantee
  std::ostream* trace = nullptr;      // JSON-lines per-iteration trace
  const DifferenceSet* good_pairs = nullptr;  // harness-only, enables the delta diagnostic
};

// Submartingale potential (|T_g ∩ T'| - (alpha^2/6)|T'|) / |T|.
inline double filter_potential(const DifferenceSet& current, const DifferenceSet& good,
                               Index initial_size, double alpha) {
  std::unordered_set<std::uint64_t> good_keys;
  good_keys.reserve(good.pairs.size() * 2);
  for (const auto& [i, j] : good.pairs)
    good_keys.insert(static_cast<std::uint64_t>(i) << 32 | static_cast<std::uint64_t>(j));
  Index overlap = 0;
  for (const auto& [i, j] : current.pairs)
    overlap += good_keys.count(static_cast<std::uint64_t>(i) << 32 | static_cast<std::uint64_t>(j));
  if (initial_size <= 0) return 0.0;
  return (static_cast<double>(overlap) -
          (alpha * alpha / 6.0) * static_cast<double>(current.size())) /
         static_cast<double>(initial_size);
}

namespace detail {

// Point range over the alive subset of a difference set.
struct AliveDifferences {
  const Eigen::MatrixXd* rows;
  const std::vector<std::pair<Index, Index>>* pairs;
  const std::vector<Index>* alive_ids;
  Index size() const { return static_cast<Index>(alive_ids->size()); }
  Index dim() const { return rows->cols(); }
  auto point(Index p) const {
    const auto& [i, j] = (*pairs)[static_cast<std::size_t>((*alive_ids)[static_cast<std::size_t>(p)])];
    return (rows->row(i) - rows->row(j)).transpose();
  }
};

inline void trace_line(std::ostream& os, long long iter, const SparseDirection& dir, double value,
                       Index removed, double delta, bool have_delta) {
  os << "{\"iter\":" << iter << ",\"support\":[";
  for (std::size_t a = 0; a < dir.support.size(); ++a) os << (a ? "," : "") << dir.support[a];
  os << "],\"value\":" << value << ",\"removed\":" << removed;
  if (have_delta) os << ",\"delta\":" << delta;
  os << "}\n";
}

}  // namespace detail

// Iterative randomized moment filter on a difference set. Each iteration
// asks the oracle for a violating k-sparse direction v, removes each pair
// independently with probability <v,d>^t / max <v,d>^t, and always removes
// the argmax pair. Stops once the oracle certifies
// sum_{d in T'} <v,d>^t <= 6 * M_eff * |T| for all k-sparse unit v.
inline DifferenceSet dp_filter(const DifferenceSet& T, const MomentParams& params,
                               std::uint64_t seed, const FilterOptions& opt = {}) {
  const Dataset& data = *T.parent;
  params.validate(data.n());
  const Eigen::MatrixXd& rows = data.samples;
  const Index n = data.n();
  const Index initial = T.size();
  const double m_eff = opt.m_eff_override > 0.0 ? opt.m_eff_override : effective_moment_bound(params);
  const double threshold = 6.0 * m_eff * static_cast<double>(initial);
  const int t = params.t;

  std::vector<char> alive(static_cast<std::size_t>(initial), 1);
  Index alive_count = initial;

  // Good-pair keys for the delta diagnostic only.
  std::unordered_set<std::uint64_t> good_keys;
  if (opt.good_pairs)
    for (const auto& [i, j] : opt.good_pairs->pairs)
      good_keys.insert(static_cast<std::uint64_t>(i) << 32 | static_cast<std::uint64_t>(j));

  // For t = 2 the oracle input is fully summarized by the second-moment
  // matrix, which we maintain incrementally under removals.
  Eigen::MatrixXd gram;
  Eigen::VectorXd diff(n);
  if (t == 2) {
    gram = Eigen::MatrixXd::Zero(n, n);
    for (Index p = 0; p < initial; ++p) {
      const auto& [i, j] = T.pairs[static_cast<std::size_t>(p)];
      diff = (rows.row(i) - rows.row(j)).transpose();
      gram.selfadjointView<Eigen::Lower>().rankUpdate(diff);
    }
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  }

  const long long cap = opt.soft_iteration_cap > 0
                            ? std::min<long long>(opt.soft_iteration_cap, initial + 1)
                            : initial + 1;
  std::vector<double> weights(static_cast<std::size_t>(initial), 0.0);

  for (long long iter = 0;; ++iter) {
    if (iter >= cap)
      throw std::runtime_error("dp_filter: iteration cap exceeded (" + std::to_string(iter) +
                               " iterations, " + std::to_string(alive_count) + " pairs alive)");
    if (alive_count == 0) break;

    double value;
    SparseDirection dir;
    if (t == 2) {
      std::tie(value, dir) = sparse_top_eigen(gram, params.k, opt.oracle.enum_budget);
    } else {
      std::vector<Index> ids;
      ids.reserve(static_cast<std::size_t>(alive_count));
      for (Index p = 0; p < initial; ++p)
        if (alive[static_cast<std::size_t>(p)]) ids.push_back(p);
      detail::AliveDifferences pts{&rows, &T.pairs, &ids};
      std::tie(value, dir) = sparse_moment_ascent(pts, params.k, t, opt.oracle.restarts,
                                                  derive_seed(seed, 0x8000u + static_cast<std::uint64_t>(iter)),
                                                  opt.oracle);
    }
    if (value <= threshold) break;

    // Weights and argmax (lowest pair index wins ties).
    double w_max = -1.0;
    Index argmax = -1;
    for (Index p = 0; p < initial; ++p) {
      if (!alive[static_cast<std::size_t>(p)]) continue;
      const auto& [i, j] = T.pairs[static_cast<std::size_t>(p)];
      const double w = std::pow(dir.dot_diff(rows, i, j), t);
      weights[static_cast<std::size_t>(p)] = w;
      if (w > w_max) {
        w_max = w;
        argmax = p;
      }
    }

    Index removed = 0;
    for (Index p = 0; p < initial; ++p) {
      if (!alive[static_cast<std::size_t>(p)]) continue;
      const auto& [i, j] = T.pairs[static_cast<std::size_t>(p)];
      bool drop = (p == argmax);
      if (!drop && w_max > 0.0) {
        const double u = keyed_uniform(derive_seed(seed, static_cast<std::uint64_t>(iter)),
                                       static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
        drop = u < weights[static_cast<std::size_t>(p)] / w_max;
      }
      if (drop) {
        alive[static_cast<std::size_t>(p)] = 0;
        --alive_count;
        ++removed;
        if (t == 2) {
          diff = (rows.row(i) - rows.row(j)).transpose();
          gram.selfadjointView<Eigen::Lower>().rankUpdate(diff, -1.0);
        }
      }
    }
    if (t == 2) gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

    if (opt.trace) {
      double delta = 0.0;
      if (opt.good_pairs) {
        Index overlap = 0;
        for (Index p = 0; p < initial; ++p) {
          if (!alive[static_cast<std::size_t>(p)]) continue;
          const auto& [i, j] = T.pairs[static_cast<std::size_t>(p)];
          overlap += good_keys.count(static_cast<std::uint64_t>(i) << 32 |
                                     static_cast<std::uint64_t>(j));
        }
        delta = (static_cast<double>(overlap) -
                 (params.alpha * params.alpha / 6.0) * static_cast<double>(alive_count)) /
                static_cast<double>(initial);
      }
      detail::trace_line(*opt.trace, iter, dir, value, removed, delta, opt.good_pairs != nullptr);
    }
  }

  DifferenceSet out;
  out.parent = T.parent;
  out.pairs.reserve(static_cast<std::size_t>(alive_count));
  for (Index p = 0; p < initial; ++p)
    if (alive[static_cast<std::size_t>(p)]) out.pairs.push_back(T.pairs[static_cast<std::size_t>(p)]);
  return out;
}

}  // namespace lsme
