#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lsme/generate.hpp"
#include "lsme/graph.hpp"
#include "lsme/rng.hpp"
#include "lsme/sparse.hpp"
#include "lsme/types.hpp"

namespace lsme {

struct LemmaResult {
  std::string name;
  long long checks = 0;     // individual inequality evaluations
  long long failures = 0;
  std::vector<std::string> counterexamples;
  bool passed() const { return failures == 0 && checks > 0; }
};

struct VerifyReport {
  std::vector<LemmaResult> lemmas;
  bool all_passed() const {
    for (const auto& l : lemmas)
      if (!l.passed()) return false;
    return true;
  }
};

namespace detail {

constexpr double kLemmaTol = 1e-9;

inline void record_failure(LemmaResult& r, const std::string& what) {
  ++r.failures;
  if (r.counterexamples.size() < 10) r.counterexamples.push_back(what);
}

// Random instance for the graph-lemma checks: a small point cloud drawn
// from a couple of Gaussian clusters, a random graph with a planted clique,
// and a nested good subset of the clique.
struct LemmaInstance {
  Dataset data;
  PairGraph graph{0};
  std::vector<Index> clique;       // planted clique C
  std::vector<Index> clique_good;  // C_g subset of C
  int k = 1;
  int t = 2;
  std::uint64_t seed = 0;
};

inline LemmaInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  LemmaInstance inst;
  inst.seed = seed;
  const Index m = 8 + static_cast<Index>(rng.uniform_int(33));  // 8..40
  const Index n = 2 + static_cast<Index>(rng.uniform_int(7));   // 2..8
  inst.k = 1 + static_cast<int>(rng.uniform_int(std::min<std::uint64_t>(3, static_cast<std::uint64_t>(n))));
  inst.t = rng.uniform() < 0.5 ? 2 : 4;

  const int clusters = 1 + static_cast<int>(rng.uniform_int(3));
  std::vector<Eigen::VectorXd> centers;
  for (int c = 0; c < clusters; ++c)
    centers.push_back(detail::random_sparse_mean(n, inst.k, rng.uniform(0.0, 6.0), rng));
  inst.data.samples.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    const auto& c = centers[static_cast<std::size_t>(rng.uniform_int(centers.size()))];
    for (Index j = 0; j < n; ++j) inst.data.samples(i, j) = c[j] + rng.gaussian();
  }

  // Random graph plus a planted clique.
  inst.graph = PairGraph(m);
  const double p = rng.uniform(0.15, 0.9);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      if (rng.uniform() < p) inst.graph.add_edge(i, j);
  const Index csize = 3 + static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(m - 2)));
  std::vector<Index> verts(static_cast<std::size_t>(m));
  std::iota(verts.begin(), verts.end(), Index{0});
  for (Index a = 0; a < csize; ++a) {
    const std::size_t pick = static_cast<std::size_t>(a) + rng.uniform_int(static_cast<std::uint64_t>(m - a));
    std::swap(verts[static_cast<std::size_t>(a)], verts[pick]);
  }
  inst.clique.assign(verts.begin(), verts.begin() + csize);
  std::sort(inst.clique.begin(), inst.clique.end());
  for (std::size_t a = 0; a < inst.clique.size(); ++a)
    for (std::size_t b = a + 1; b < inst.clique.size(); ++b)
      if (!inst.graph.has_edge(inst.clique[a], inst.clique[b]))
        inst.graph.add_edge(inst.clique[a], inst.clique[b]);
  const Index gsize = 1 + static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(csize)));
  inst.clique_good.assign(inst.clique.begin(), inst.clique.begin() + gsize);
  return inst;
}

// A small set of k-sparse unit test directions: per support, the axis
// directions, one random direction, and the restriction of a focus vector
// (the tight direction for the mean-gap lemmas).
inline std::vector<SparseDirection> test_directions(Index n, int k, const Eigen::VectorXd& focus,
                                                    Rng& rng) {
  std::vector<SparseDirection> dirs;
  for_each_support(n, k, [&](const std::vector<Index>& sup) {
    SparseDirection d;
    d.support = sup;
    d.values = Eigen::VectorXd::Zero(k);
    d.values[0] = 1.0;
    dirs.push_back(d);

    Eigen::VectorXd r(k);
    for (int a = 0; a < k; ++a) r[a] = rng.gaussian();
    if (r.norm() > 1e-12) {
      SparseDirection dr;
      dr.support = sup;
      dr.values = r / r.norm();
      dirs.push_back(dr);
    }

    Eigen::VectorXd f(k);
    for (int a = 0; a < k; ++a) f[a] = focus[sup[static_cast<std::size_t>(a)]];
    if (f.norm() > 1e-12) {
      SparseDirection df;
      df.support = sup;
      df.values = f / f.norm();
      dirs.push_back(df);
    }
  });
  return dirs;
}

inline Eigen::VectorXd subset_mean(const Eigen::MatrixXd& rows, const std::vector<Index>& idx) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(rows.cols());
  for (Index i : idx) mean += rows.row(i).transpose();
  return mean / static_cast<double>(idx.size());
}

// Lemma: for a clique C in a bounded-moment graph and C_g subset of C with
// |C_g| >= alpha * m, <v, mu_C - mu_g>^t <= 2 * M_v / alpha^2 per direction.
inline void check_clique_means(const LemmaInstance& inst, LemmaResult& out, Rng& rng) {
  const Index m = inst.data.m();
  const Eigen::VectorXd mu_c = subset_mean(inst.data.samples, inst.clique);
  const Eigen::VectorXd mu_g = subset_mean(inst.data.samples, inst.clique_good);
  const double alpha = static_cast<double>(inst.clique_good.size()) / static_cast<double>(m);
  const auto dirs = test_directions(inst.data.n(), inst.k, mu_c - mu_g, rng);
  for (const auto& v : dirs) {
    const double lhs = std::pow(v.dot(mu_c - mu_g), inst.t);
    const double mv = graph_moment(inst.graph, inst.data, v, inst.t);
    const double rhs = 2.0 * mv / (alpha * alpha);
    ++out.checks;
    if (lhs > rhs + kLemmaTol) {
      std::ostringstream os;
      os << "clique-means seed=" << inst.seed << " lhs=" << lhs << " rhs=" << rhs;
      record_failure(out, os.str());
    }
  }
}

// Lemma: graph_moment(R_gamma(G)) <= 2 * 2^t * graph_moment(G) / gamma,
// per fixed direction.
inline void check_overlap_moment_transfer(const LemmaInstance& inst, LemmaResult& out, Rng& rng) {
  const double gamma = rng.uniform(0.05, 0.9);
  const PairGraph r = overlap_graph(inst.graph, gamma);
  const auto dirs = test_directions(inst.data.n(), inst.k, inst.data.samples.colwise().mean(), rng);
  for (const auto& v : dirs) {
    const double lhs = graph_moment(r, inst.data, v, inst.t);
    const double rhs =
        2.0 * std::pow(2.0, inst.t) * graph_moment(inst.graph, inst.data, v, inst.t) / gamma;
    ++out.checks;
    if (lhs > rhs + kLemmaTol) {
      std::ostringstream os;
      os << "overlap-moment seed=" << inst.seed << " gamma=" << gamma << " lhs=" << lhs
         << " rhs=" << rhs;
      record_failure(out, os.str());
    }
  }
}

// Lemma: the average over vertices x of the number of N_G(x)-pairs that are
// non-adjacent in R_gamma(G) is at most gamma * m^2. Also checks, by full
// enumeration, that the per-vertex sum equals the independent triple count.
inline void check_overlap_density(const LemmaInstance& inst, LemmaResult& out, Rng& rng) {
  const double gamma = rng.uniform(0.05, 0.9);
  const Index m = inst.data.m();
  const PairGraph r = overlap_graph(inst.graph, gamma);

  long long per_vertex_total = 0;
  for (Index x = 0; x < m; ++x) {
    const auto nb = inst.graph.neighbors(x);
    per_vertex_total += non_adjacent_pairs(r, nb);
  }
  // Independent route: for each non-adjacent pair (y,z) in R, count common
  // G-neighbors; each contributes one bad pair to every such x.
  long long triple_total = 0;
  for (Index y = 0; y < m; ++y)
    for (Index z = y + 1; z < m; ++z)
      if (!r.has_edge(y, z)) triple_total += inst.graph.common_neighbors(y, z);

  ++out.checks;
  if (per_vertex_total != triple_total) {
    std::ostringstream os;
    os << "overlap-density enumeration identity seed=" << inst.seed << " per-vertex="
       << per_vertex_total << " triples=" << triple_total;
    record_failure(out, os.str());
  }
  ++out.checks;
  const double avg = static_cast<double>(per_vertex_total) / static_cast<double>(m);
  if (avg > gamma * static_cast<double>(m) * static_cast<double>(m) + kLemmaTol) {
    std::ostringstream os;
    os << "overlap-density bound seed=" << inst.seed << " avg=" << avg << " gamma*m^2="
       << gamma * m * m;
    record_failure(out, os.str());
  }
}

// Lemma: when gamma <= beta^2/36 for the instance, prune returns W' with
// |W'| >= |W| - (6 gamma / beta) m and W' a clique in R_{beta/3}(G).
inline void check_prune_one(const PairGraph& g, const std::vector<Index>& w, std::uint64_t seed,
                            LemmaResult& out) {
  const Index m = g.vertex_count();
  const double beta = static_cast<double>(w.size()) / static_cast<double>(m);
  const double gamma = static_cast<double>(non_adjacent_pairs(g, w)) /
                       (static_cast<double>(m) * static_cast<double>(m));
  if (gamma > beta * beta / 36.0) return;  // lemma preconditions not met
  const auto kept = prune(g, w);
  ++out.checks;
  if (static_cast<double>(kept.size()) <
      static_cast<double>(w.size()) - (6.0 * gamma / beta) * static_cast<double>(m) - kLemmaTol) {
    std::ostringstream os;
    os << "prune-size seed=" << seed << " |W|=" << w.size() << " |W'|=" << kept.size()
       << " gamma=" << gamma << " beta=" << beta;
    record_failure(out, os.str());
  }
  const PairGraph r = overlap_graph(g, beta / 3.0);
  ++out.checks;
  if (non_adjacent_pairs(r, kept) != 0) {
    std::ostringstream os;
    os << "prune-clique seed=" << seed << " |W'|=" << kept.size()
       << " non-adjacent=" << non_adjacent_pairs(r, kept);
    record_failure(out, os.str());
  }
}

inline void check_prune_clique(const LemmaInstance& inst, LemmaResult& out, Rng& rng) {
  const Index m = inst.data.m();
  // The planted clique exercises the gamma = 0 case.
  check_prune_one(inst.graph, inst.clique, inst.seed, out);

  // Random W; small sets are skipped because the pruning counts only make
  // sense once |W|/6 exceeds one vertex.
  std::vector<Index> w;
  for (Index i = 0; i < m; ++i)
    if (rng.uniform() < 0.5) w.push_back(i);
  if (w.size() >= 7) check_prune_one(inst.graph, w, inst.seed, out);

  // Dense near-clique with gamma > 0: a clique with a few dispersed edges
  // knocked out, embedded in a sparse background graph.
  if (m >= 12) {
    const Index wsize = std::max<Index>(7, m / 2);
    std::vector<Index> dense(static_cast<std::size_t>(wsize));
    std::iota(dense.begin(), dense.end(), Index{0});
    const Index max_holes = static_cast<Index>(static_cast<double>(wsize * wsize) / 36.0);
    const Index holes = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(max_holes + 1)));
    std::vector<std::pair<Index, Index>> skip;
    for (Index hidx = 0; hidx < holes; ++hidx) {
      const Index a = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(wsize)));
      const Index b = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(wsize)));
      if (a != b) skip.emplace_back(std::min(a, b), std::max(a, b));
    }
    PairGraph h(m);
    for (Index i = 0; i < wsize; ++i)
      for (Index j = i + 1; j < wsize; ++j) {
        bool hole = false;
        for (const auto& s : skip)
          if (s.first == i && s.second == j) hole = true;
        if (!hole) h.add_edge(i, j);
      }
    for (Index i = 0; i < m; ++i)
      for (Index j = std::max(i + 1, wsize); j < m; ++j)
        if (rng.uniform() < 0.1) h.add_edge(i, j);
    check_prune_one(h, dense, inst.seed, out);
  }
}

// Lemma: for T subset of S with |T| >= alpha |S|, per direction v,
// <v, mu_S - mu_T>^t <= M_v / alpha with M_v the centered empirical moment.
inline void check_subset_mean_gap(const LemmaInstance& inst, LemmaResult& out, Rng& rng) {
  const Index m = inst.data.m();
  std::vector<Index> subset;
  for (Index i = 0; i < m; ++i)
    if (rng.uniform() < 0.4) subset.push_back(i);
  if (subset.empty()) subset.push_back(static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(m))));
  const double alpha = static_cast<double>(subset.size()) / static_cast<double>(m);

  std::vector<Index> all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Index{0});
  const Eigen::VectorXd mu_s = subset_mean(inst.data.samples, all);
  const Eigen::VectorXd mu_t = subset_mean(inst.data.samples, subset);

  const auto dirs = test_directions(inst.data.n(), inst.k, mu_s - mu_t, rng);
  for (const auto& v : dirs) {
    double mv = 0.0;
    for (Index i = 0; i < m; ++i)
      mv += std::pow(v.dot(inst.data.samples.row(i).transpose()) - v.dot(mu_s), inst.t);
    mv /= static_cast<double>(m);
    const double lhs = std::pow(v.dot(mu_s - mu_t), inst.t);
    ++out.checks;
    if (lhs > mv / alpha + kLemmaTol) {
      std::ostringstream os;
      os << "subset-mean-gap seed=" << inst.seed << " lhs=" << lhs << " rhs=" << mv / alpha;
      record_failure(out, os.str());
    }
  }
}

// Monte Carlo check of the bounded-submartingale minimum bound:
// P[min_i X_i >= tau] >= (E[X_1] - tau)/(1 - tau), up to 3 standard errors.
inline void check_submartingale_bound(std::uint64_t seed, LemmaResult& out) {
  struct Config {
    double x0, tau, up_drift, step;
  };
  const Config configs[] = {
      {0.9, 0.5, 0.004, 0.05},
      {0.8, 0.3, 0.002, 0.08},
      {0.7, 0.4, 0.0, 0.03},
      {0.95, 0.6, 0.01, 0.1},
  };
  const int trials = 4000;
  const int steps = 60;
  int cfg_id = 0;
  for (const auto& c : configs) {
    Rng rng(derive_seed(seed, 0xA3 + static_cast<std::uint64_t>(cfg_id++)));
    int ok = 0;
    for (int tr = 0; tr < trials; ++tr) {
      double x = c.x0;
      double mn = x;
      for (int s = 0; s < steps; ++s) {
        // Move only when both outcomes stay inside [0,1]; nonnegative drift
        // keeps the process a submartingale under the freeze rule.
        const double up = x + c.up_drift + c.step;
        const double dn = x + c.up_drift - c.step;
        if (up <= 1.0 && dn >= 0.0) x = rng.uniform() < 0.5 ? up : dn;
        mn = std::min(mn, x);
      }
      ok += (mn >= c.tau);
    }
    const double p_hat = static_cast<double>(ok) / trials;
    const double bound = (c.x0 - c.tau) / (1.0 - c.tau);
    const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-9) / trials);
    ++out.checks;
    if (p_hat < bound - 3.0 * se) {
      std::ostringstream os;
      os << "submartingale x0=" << c.x0 << " tau=" << c.tau << " p_hat=" << p_hat
         << " bound=" << bound;
      record_failure(out, os.str());
    }
  }
}

}  // namespace detail

// Runs every lemma-level inequality check on random small instances plus a
// Monte Carlo submartingale check. Failures are report entries.
inline VerifyReport verify_lemmas(std::uint64_t seed, int instances) {
  if (instances < 1) throw ParameterError("verify_lemmas: instances must be >= 1");
  VerifyReport report;
  report.lemmas = {
      {"clique_means", 0, 0, {}},           {"overlap_moment_transfer", 0, 0, {}},
      {"overlap_density", 0, 0, {}},        {"prune_clique", 0, 0, {}},
      {"subset_mean_gap", 0, 0, {}},        {"submartingale_bound", 0, 0, {}},
  };
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t inst_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    auto inst = detail::random_instance(inst_seed);
    Rng rng(derive_seed(inst_seed, 0xD1));
    detail::check_clique_means(inst, report.lemmas[0], rng);
    detail::check_overlap_moment_transfer(inst, report.lemmas[1], rng);
    detail::check_overlap_density(inst, report.lemmas[2], rng);
    detail::check_prune_clique(inst, report.lemmas[3], rng);
    detail::check_subset_mean_gap(inst, report.lemmas[4], rng);
  }
  detail::check_submartingale_bound(seed, report.lemmas[5]);
  return report;
}

}  // namespace lsme
