#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lsme/rng.hpp"
#include "lsme/types.hpp"

namespace lsme {

enum class Adversary { FarCluster, SparseMixture, MirrorShift, UniformNoise };

inline std::string to_string(Adversary a) {
  switch (a) {
    case Adversary::FarCluster: return "far_cluster";
    case Adversary::SparseMixture: return "sparse_mixture";
    case Adversary::MirrorShift: return "mirror_shift";
    case Adversary::UniformNoise: return "uniform_noise";
  }
  return "?";
}

inline Adversary adversary_from_string(const std::string& s) {
  if (s == "far_cluster") return Adversary::FarCluster;
  if (s == "sparse_mixture") return Adversary::SparseMixture;
  if (s == "mirror_shift") return Adversary::MirrorShift;
  if (s == "uniform_noise") return Adversary::UniformNoise;
  throw ParameterError("unknown adversary: " + s);
}

struct ScenarioConfig {
  Index n = 16;
  Index m = 300;
  int k = 3;
  int t = 2;
  double alpha = 0.2;
  double moment_bound = -1.0;  // <= 0: default t^{t/2}
  double mu_norm = 8.0;
  Adversary adversary = Adversary::SparseMixture;
  int trials = 1;
  std::uint64_t seed = 0;

  double resolved_moment_bound() const {
    return moment_bound > 0.0 ? moment_bound : std::pow(static_cast<double>(t), t / 2.0);
  }
};

struct GeneratedScenario {
  Dataset data;        // with inlier_mask
  Eigen::VectorXd mu_true;
};

namespace detail {

// Random k-sparse vector of the given norm: random support, random signs,
// equal magnitudes.
inline Eigen::VectorXd random_sparse_mean(Index n, int k, double norm, Rng& rng) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  for (int a = 0; a < k; ++a) {
    const std::size_t pick = a + rng.uniform_int(static_cast<std::uint64_t>(n - a));
    std::swap(all[static_cast<std::size_t>(a)], all[pick]);
  }
  const double mag = norm / std::sqrt(static_cast<double>(k));
  for (int a = 0; a < k; ++a)
    mu[all[static_cast<std::size_t>(a)]] = rng.uniform() < 0.5 ? mag : -mag;
  return mu;
}

}  // namespace detail

// Corrupted dataset per the named adversary; the inlier rows are i.i.d.
// N(mu_true, I). Rows are shuffled so inliers are not a prefix.
inline GeneratedScenario gen_corrupted(const ScenarioConfig& cfg) {
  const Index n = cfg.n, m = cfg.m;
  const int k = cfg.k;
  if (n < 1 || m < 1 || k < 1 || k > n) throw ParameterError("gen_corrupted: bad dimensions");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5)) throw ParameterError("gen_corrupted: alpha must lie in (0, 1/2)");
  const Index n_in = static_cast<Index>(std::floor(cfg.alpha * static_cast<double>(m)));
  if (n_in < 2) throw ParameterError("gen_corrupted: floor(alpha*m) must be >= 2");
  if (!(cfg.mu_norm >= 0.0)) throw ParameterError("gen_corrupted: mu_norm must be nonnegative");

  Rng rng(derive_seed(cfg.seed, 0xDA7A));
  const Eigen::VectorXd mu = detail::random_sparse_mean(n, k, cfg.mu_norm, rng);

  Eigen::MatrixXd rows(m, n);
  std::vector<char> mask(static_cast<std::size_t>(m), 0);
  for (Index i = 0; i < n_in; ++i) {
    mask[static_cast<std::size_t>(i)] = 1;
    for (Index c = 0; c < n; ++c) rows(i, c) = mu[c] + rng.gaussian();
  }

  const Index n_out = m - n_in;
  switch (cfg.adversary) {
    case Adversary::FarCluster: {
      // Point mass at distance 10*mu_norm along a dense direction.
      Eigen::VectorXd dir(n);
      for (Index c = 0; c < n; ++c) dir[c] = rng.gaussian();
      dir.normalize();
      const Eigen::VectorXd mass = mu + 10.0 * cfg.mu_norm * dir;
      for (Index i = 0; i < n_out; ++i) rows.row(n_in + i) = mass.transpose();
      break;
    }
    case Adversary::SparseMixture: {
      const int decoys = static_cast<int>(std::floor(1.0 / cfg.alpha)) - 1;
      std::vector<Eigen::VectorXd> centers;
      for (int d = 0; d < std::max(1, decoys); ++d)
        centers.push_back(detail::random_sparse_mean(n, k, cfg.mu_norm, rng));
      for (Index i = 0; i < n_out; ++i) {
        const Eigen::VectorXd& c = centers[static_cast<std::size_t>(i) % centers.size()];
        for (Index cc = 0; cc < n; ++cc) rows(n_in + i, cc) = c[cc] + rng.gaussian();
      }
      break;
    }
    case Adversary::MirrorShift: {
      // Inlier copies reflected through the point -mu_true.
      for (Index i = 0; i < n_out; ++i)
        rows.row(n_in + i) = (-2.0 * mu).transpose() - rows.row(i % n_in);
      break;
    }
    case Adversary::UniformNoise: {
      const double box = 10.0 * std::max(cfg.mu_norm, 1.0);
      for (Index i = 0; i < n_out; ++i)
        for (Index c = 0; c < n; ++c) rows(n_in + i, c) = rng.uniform(-box, box);
      break;
    }
  }

  // Deterministic row shuffle, mask kept aligned.
  for (Index i = m - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
    rows.row(i).swap(rows.row(j));
    std::swap(mask[static_cast<std::size_t>(i)], mask[static_cast<std::size_t>(j)]);
  }

  GeneratedScenario out;
  out.data.samples = std::move(rows);
  out.data.inlier_mask = std::move(mask);
  out.mu_true = mu;
  return out;
}

// Uniformly random permutation matrix with independently sign-flipped rows.
inline Eigen::MatrixXd random_signed_permutation(Index n, std::uint64_t seed) {
  if (n < 1) throw ParameterError("random_signed_permutation: n must be >= 1");
  Rng rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    a(i, perm[static_cast<std::size_t>(i)]) = rng.uniform() < 0.5 ? 1.0 : -1.0;
  return a;
}

}  // namespace lsme
