#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsme {

using Index = Eigen::Index;

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a support enumeration would exceed the configured budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sample matrix, rows are points. The inlier mask is harness-only ground
// truth and never consulted by the estimator.
struct Dataset {
  Eigen::MatrixXd samples;  // m x n
  std::optional<std::vector<char>> inlier_mask;

  Index m() const { return samples.rows(); }
  Index n() const { return samples.cols(); }

  void validate() const {
    if (m() < 1 || n() < 1) throw ParameterError("dataset must be at least 1x1");
    if (!samples.allFinite()) throw ParameterError("dataset contains non-finite entries");
    if (inlier_mask && static_cast<Index>(inlier_mask->size()) != m())
      throw ParameterError("inlier mask length does not match sample count");
  }

  Index inlier_count() const {
    if (!inlier_mask) return 0;
    Index c = 0;
    for (char f : *inlier_mask) c += (f != 0);
    return c;
  }
};

struct MomentParams {
  int t = 2;                  // moment order, even
  int k = 1;                  // sparsity level
  double moment_bound = 1.0;  // M
  double alpha = 0.1;         // inlier fraction, in (0, 1/2)
  int sos_degree = 0;         // carried for config fidelity; no operation consumes it

  void validate(Index n) const {
    if (t < 2 || t % 2 != 0) throw ParameterError("t must be even and >= 2");
    if (k < 1 || k > n) throw ParameterError("k out of range");
    if (!(moment_bound > 0.0)) throw ParameterError("moment bound must be positive");
    if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha must lie in (0, 1/2)");
  }
};

// A k-sparse unit vector: sorted support indices plus aligned values.
struct SparseDirection {
  std::vector<Index> support;
  Eigen::VectorXd values;

  double dot(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double s = 0.0;
    for (std::size_t a = 0; a < support.size(); ++a) s += values[static_cast<Index>(a)] * x[support[a]];
    return s;
  }

  // <v, x_i - x_j> without materializing the difference.
  double dot_diff(const Eigen::MatrixXd& rows, Index i, Index j) const {
    double s = 0.0;
    for (std::size_t a = 0; a < support.size(); ++a) {
      const Index c = support[a];
      s += values[static_cast<Index>(a)] * (rows(i, c) - rows(j, c));
    }
    return s;
  }

  Eigen::VectorXd dense(Index n) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (std::size_t a = 0; a < support.size(); ++a) out[support[a]] = values[static_cast<Index>(a)];
    return out;
  }

  void validate(Index n, int k) const {
    if (static_cast<int>(support.size()) > k) throw ParameterError("support larger than k");
    if (values.size() != static_cast<Index>(support.size()))
      throw ParameterError("support/values size mismatch");
    Index prev = -1;
    for (Index c : support) {
      if (c <= prev || c >= n) throw ParameterError("support indices must be strictly increasing and < n");
      prev = c;
    }
    if (std::abs(values.norm() - 1.0) > 1e-12) throw ParameterError("direction is not unit norm");
  }
};

// Unordered sample-index pairs into a parent dataset; pair {i, j} stands for
// the difference x_i - x_j (orientation is irrelevant for even t).
struct DifferenceSet {
  const Dataset* parent = nullptr;
  std::vector<std::pair<Index, Index>> pairs;  // i < j, sorted, unique

  Index size() const { return static_cast<Index>(pairs.size()); }
};

struct EstimateList {
  std::vector<Eigen::VectorXd> candidates;
  std::vector<std::uint64_t> seeds;  // one per surviving candidate
  long long fail_count = 0;
};

}  // namespace lsme
