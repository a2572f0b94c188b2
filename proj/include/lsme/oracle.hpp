#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "lsme/pairs.hpp"
#include "lsme/rng.hpp"
#include "lsme/sparse.hpp"
#include "lsme/types.hpp"

namespace lsme {

struct OracleOptions {
  double enum_budget = 1e6;  // max number of supports to enumerate
  int restarts = 8;          // random restarts for the ascent oracle
  int power_iters = 100;     // iteration cap per restart
};

struct DirectionCertificate {
  enum class Kind { Bounded, Violation };
  Kind kind = Kind::Bounded;
  std::optional<SparseDirection> direction;  // present iff Violation
  double value = 0.0;                        // achieved sum of <v,x>^t
  bool exact = false;                        // max is provably exact for this instance class
};

inline void check_enum_budget(Index n, int k, double budget) {
  const double c = support_count(n, k);
  if (c > budget)
    throw BudgetError("support enumeration budget exceeded: C(" + std::to_string(n) + "," +
                      std::to_string(k) + ") = " + std::to_string(c));
}

namespace detail {

// Deterministic sign convention: the largest-magnitude entry (lowest index
// on ties) is made positive.
inline void canonicalize_sign(Eigen::VectorXd& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] < 0.0) v = -v;
}

inline SparseDirection axis_direction(const std::vector<Index>& support) {
  SparseDirection d;
  d.support = support;
  d.values = Eigen::VectorXd::Zero(static_cast<Index>(support.size()));
  d.values[0] = 1.0;
  return d;
}

}  // namespace detail

// Max over k-sparse unit v of v^T S v, where S is a (PSD) second-moment
// matrix: enumerates supports and takes the top eigenvalue of each
// restriction. Ties between supports go to the lexicographically first one.
inline std::pair<double, SparseDirection> sparse_top_eigen(const Eigen::MatrixXd& second_moment,
                                                           int k, double budget = 1e6) {
  const Index n = second_moment.rows();
  if (k < 1) throw ParameterError("sparse_top_eigen: k must be >= 1");
  if (k > n) k = static_cast<int>(n);
  check_enum_budget(n, k, budget);

  double best_value = -1.0;
  SparseDirection best;
  Eigen::MatrixXd sub(k, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for_each_support(n, k, [&](const std::vector<Index>& sup) {
    double value;
    Eigen::VectorXd vec;
    if (k == 1) {
      value = second_moment(sup[0], sup[0]);
      vec = Eigen::VectorXd::Ones(1);
    } else {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = second_moment(sup[static_cast<std::size_t>(a)], sup[static_cast<std::size_t>(b)]);
      es.compute(sub);
      value = es.eigenvalues()[k - 1];
      vec = es.eigenvectors().col(k - 1);
    }
    if (value > best_value) {
      best_value = value;
      best.support = sup;
      detail::canonicalize_sign(vec);
      best.values = vec / vec.norm();
    }
  });
  if (best_value <= 0.0) {
    // Degenerate (all points zero): canonical axis direction on the first support.
    std::vector<Index> first(static_cast<std::size_t>(k));
    std::iota(first.begin(), first.end(), Index{0});
    return {std::max(best_value, 0.0), detail::axis_direction(first)};
  }
  return {best_value, best};
}

// Exact oracle for t = 2: max over k-sparse unit v of sum_x <v,x>^2.
template <PointRange R>
std::pair<double, SparseDirection> sparse_moment_max_exact_t2(const R& pts, int k,
                                                              const OracleOptions& opt = {}) {
  const Index n = pts.dim();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd x(n);
  for (Index i = 0; i < pts.size(); ++i) {
    x = pts.point(i);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return sparse_top_eigen(gram, k, opt.enum_budget);
}

// Heuristic oracle for even t >= 4: per-support projected power ascent on
// sum_x <v,x>^t with random restarts. The returned value is achieved by a
// feasible direction, hence a certified lower bound on the true max.
template <PointRange R>
std::pair<double, SparseDirection> sparse_moment_ascent(const R& pts, int k, int t, int restarts,
                                                        std::uint64_t seed,
                                                        const OracleOptions& opt = {}) {
  if (t < 4 || t % 2 != 0) throw ParameterError("sparse_moment_ascent: t must be even and >= 4");
  const Index n = pts.dim();
  const Index count = pts.size();
  if (k > n) k = static_cast<int>(n);
  check_enum_budget(n, k, opt.enum_budget);

  double best_value = -1.0;
  SparseDirection best;
  std::uint64_t support_index = 0;
  for_each_support(n, k, [&](const std::vector<Index>& sup) {
    // Restricted data matrix, count x k.
    Eigen::MatrixXd a(count, k);
    for (Index i = 0; i < count; ++i) {
      Eigen::VectorXd full = pts.point(i);
      for (int c = 0; c < k; ++c) a(i, c) = full[sup[static_cast<std::size_t>(c)]];
    }
    auto objective = [&](const Eigen::VectorXd& v) {
      return a.col(0).size() == 0 ? 0.0 : (a * v).array().pow(t).sum();
    };
    auto run_ascent = [&](Eigen::VectorXd v) {
      for (int it = 0; it < opt.power_iters; ++it) {
        Eigen::VectorXd proj = a * v;
        Eigen::VectorXd grad = a.transpose() * proj.array().pow(t - 1).matrix();
        const double norm = grad.norm();
        if (norm < 1e-300) break;
        Eigen::VectorXd next = grad / norm;
        if ((next - v).norm() < 1e-14) {
          v = next;
          break;
        }
        v = next;
      }
      return v;
    };

    Rng rng(derive_seed(seed, support_index++));
    for (int r = 0; r < std::max(1, restarts); ++r) {
      Eigen::VectorXd v0(k);
      if (r == 0) {
        // Deterministic start: top eigenvector of the restricted Gram.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
        v0 = es.eigenvectors().col(k - 1);
      } else {
        for (int c = 0; c < k; ++c) v0[c] = rng.gaussian();
      }
      const double nrm = v0.norm();
      v0 = nrm > 1e-300 ? Eigen::VectorXd(v0 / nrm) : Eigen::VectorXd::Unit(k, 0);
      Eigen::VectorXd v = run_ascent(v0);
      const double value = objective(v);
      if (value > best_value) {
        best_value = value;
        best.support = sup;
        detail::canonicalize_sign(v);
        best.values = v;
      }
    }
  });
  if (best_value <= 0.0) {
    std::vector<Index> first(static_cast<std::size_t>(k));
    std::iota(first.begin(), first.end(), Index{0});
    return {std::max(best_value, 0.0), detail::axis_direction(first)};
  }
  return {best_value, best};
}

// Decides bounded-vs-violating for sum_x <v,x>^t against a threshold,
// dispatching to the exact t=2 oracle or the ascent oracle.
template <PointRange R>
DirectionCertificate certify_or_violate(const R& pts, const MomentParams& params, double threshold,
                                        std::uint64_t seed, const OracleOptions& opt = {}) {
  if (!(threshold > 0.0)) throw ParameterError("certify_or_violate: threshold must be positive");
  DirectionCertificate cert;
  if (pts.size() == 0) {
    cert.kind = DirectionCertificate::Kind::Bounded;
    cert.value = 0.0;
    cert.exact = true;
    return cert;
  }
  double value;
  SparseDirection dir;
  bool exact;
  if (params.t == 2) {
    std::tie(value, dir) = sparse_moment_max_exact_t2(pts, params.k, opt);
    exact = true;
  } else {
    std::tie(value, dir) = sparse_moment_ascent(pts, params.k, params.t, opt.restarts, seed, opt);
    exact = false;
  }
  cert.value = value;
  if (value > threshold) {
    cert.kind = DirectionCertificate::Kind::Violation;
    cert.direction = std::move(dir);
    cert.exact = exact;
  } else {
    cert.kind = DirectionCertificate::Kind::Bounded;
    cert.exact = exact;
  }
  return cert;
}

}  // namespace lsme
