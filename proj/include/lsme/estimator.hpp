#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "lsme/filter.hpp"
#include "lsme/graph.hpp"
#include "lsme/sparse.hpp"
#include "lsme/types.hpp"

namespace lsme {

struct PipelineOptions {
  FilterOptions filter;
  RoundingOptions rounding;
  int workers = 1;                     // parallelism across rounds only
  double merge_radius_override = -1.0;
};

// Candidates closer than this are considered duplicates of one another.
inline double merge_radius(const MomentParams& params) {
  return std::pow(params.moment_bound, 1.0 / params.t) * std::pow(params.alpha, -1.0 / params.t);
}

// Full pipeline: differences -> filter -> pair graph -> rounding -> top-k
// truncation. FAIL (nullopt) is a normal outcome of the rounding step.
inline std::optional<Eigen::VectorXd> ld_sparse_mean(const Dataset& data, const MomentParams& params,
                                                     std::uint64_t seed,
                                                     const PipelineOptions& opt = {}) {
  data.validate();
  params.validate(data.n());
  const DifferenceSet all = difference_pairs(data);
  const DifferenceSet kept = dp_filter(all, params, derive_seed(seed, 1), opt.filter);
  const PairGraph g = build_pair_graph(kept);
  const std::optional<Eigen::VectorXd> mu =
      rounding(data, g, params.alpha, derive_seed(seed, 2), opt.rounding);
  if (!mu) return std::nullopt;
  return hk_truncate(*mu, params.k);
}

// ceil(24/alpha * ln 10): enough repetitions for the per-round success
// probability alpha/24 to compound to >= 0.9.
inline int default_rounds(double alpha) {
  return static_cast<int>(std::ceil(24.0 / alpha * std::log(10.0)));
}

inline EstimateList estimate_list(const Dataset& data, const MomentParams& params, int rounds,
                                  std::uint64_t seed, const PipelineOptions& opt = {}) {
  if (rounds < 1) throw ParameterError("estimate_list: rounds must be >= 1");
  std::vector<std::optional<Eigen::VectorXd>> results(static_cast<std::size_t>(rounds));

  auto run_range = [&](int begin, int stride) {
    for (int r = begin; r < rounds; r += stride)
      results[static_cast<std::size_t>(r)] =
          ld_sparse_mean(data, params, seed + 1 + static_cast<std::uint64_t>(r), opt);
  };
  const int workers = std::max(1, opt.workers);
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
    for (auto& th : pool) th.join();
  }

  const double radius =
      opt.merge_radius_override >= 0.0 ? opt.merge_radius_override : merge_radius(params);
  EstimateList list;
  for (int r = 0; r < rounds; ++r) {
    const auto& res = results[static_cast<std::size_t>(r)];
    if (!res) {
      ++list.fail_count;
      continue;
    }
    bool duplicate = false;
    for (const auto& kept : list.candidates)
      if ((kept - *res).norm() < radius) {
        duplicate = true;
        break;
      }
    if (!duplicate) {
      list.candidates.push_back(*res);
      list.seeds.push_back(seed + 1 + static_cast<std::uint64_t>(r));
    }
  }
  return list;
}

inline double min_list_error(const EstimateList& list, const Eigen::VectorXd& mu_true) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& u : list.candidates) best = std::min(best, (u - mu_true).norm());
  return best;
}

}  // namespace lsme
