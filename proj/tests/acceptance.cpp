// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Usage: acceptance --cli /path/to/lsme [--fast]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lsme/estimator.hpp"
#include "lsme/generate.hpp"
#include "lsme/io.hpp"
#include "lsme/oracle.hpp"
#include "lsme/verify.hpp"

using namespace lsme;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// Canonical scenario shared by criteria 2-5.
ScenarioConfig canonical(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.n = 16;
  cfg.m = 300;
  cfg.k = 3;
  cfg.t = 2;
  cfg.alpha = 0.2;
  cfg.mu_norm = 8.0;
  cfg.adversary = Adversary::SparseMixture;
  cfg.seed = seed;
  return cfg;
}

MomentParams canonical_params(const ScenarioConfig& cfg) {
  MomentParams p;
  p.t = cfg.t;
  p.k = cfg.k;
  p.alpha = cfg.alpha;
  p.moment_bound = cfg.resolved_moment_bound();
  return p;
}

// Filter threshold scale used by the harness (matches the CLI default).
double harness_m_eff(const MomentParams& p) { return p.moment_bound / 4.0; }

// P[Bin(n, p) <= x] via direct summation of log-pmf terms.
double binomial_cdf(int x, int n, double p) {
  double cdf = 0.0;
  for (int i = 0; i <= x; ++i) {
    const double logpmf = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                          i * std::log(p) + (n - i) * std::log1p(-p);
    cdf += std::exp(logpmf);
  }
  return std::min(cdf, 1.0);
}

// ---------------------------------------------------------------------------

void criterion_1_lemmas() {
  const VerifyReport rep = verify_lemmas(20260826, 200);
  long long checks = 0;
  std::string first_bad;
  for (const auto& l : rep.lemmas) {
    checks += l.checks;
    if (!l.passed() && first_bad.empty())
      first_bad = l.name + (l.counterexamples.empty() ? "" : ": " + l.counterexamples.front());
  }
  std::ostringstream os;
  os << "lemma suite over 200 instances, " << checks << " inequality checks";
  if (!first_bad.empty()) os << "; first failure " << first_bad;
  report(1, rep.all_passed(), os.str());
}

void criteria_2_3_filter(int trials) {
  int retained = 0;
  long long recheck_violations = 0;
  long long recheck_runs = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const ScenarioConfig cfg = canonical(1000 + static_cast<std::uint64_t>(trial));
    const GeneratedScenario s = gen_corrupted(cfg);
    const MomentParams params = canonical_params(cfg);

    const DifferenceSet all = difference_pairs(s.data);
    // T_g: pairs whose endpoints are both inliers.
    const auto& mask = *s.data.inlier_mask;
    long long good_total = 0;
    for (const auto& pr : all.pairs)
      if (mask[static_cast<std::size_t>(pr.first)] && mask[static_cast<std::size_t>(pr.second)])
        ++good_total;

    FilterOptions fopt;
    fopt.m_eff_override = harness_m_eff(params);
    const DifferenceSet kept =
        dp_filter(all, params, derive_seed(cfg.seed, 55), fopt);

    long long good_kept = 0;
    for (const auto& pr : kept.pairs)
      if (mask[static_cast<std::size_t>(pr.first)] && mask[static_cast<std::size_t>(pr.second)])
        ++good_kept;
    if (2 * good_kept >= good_total) ++retained;

    // Criterion 3: exhaustive k-sparse re-check of the filter postcondition.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s.data.n(), s.data.n());
    for (const auto& pr : kept.pairs) {
      const Eigen::VectorXd d =
          (s.data.samples.row(pr.first) - s.data.samples.row(pr.second)).transpose();
      gram.selfadjointView<Eigen::Lower>().rankUpdate(d, 1.0);
    }
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    const auto top = sparse_top_eigen(gram, params.k, 1e9);
    ++recheck_runs;
    const double allowed =
        6.0 * fopt.m_eff_override * static_cast<double>(all.size()) * (1.0 + 1e-12);
    if (top.first > allowed) ++recheck_violations;
  }

  // One-sided binomial test of H0: p >= 2/3 at significance 0.01.
  const double pval = binomial_cdf(retained, trials, 2.0 / 3.0);
  std::ostringstream os2;
  os2 << "inlier-pair retention >= 1/2 in " << retained << "/" << trials
      << " trials (binomial p-value " << pval << " vs 0.01)";
  report(2, pval > 0.01, os2.str());

  std::ostringstream os3;
  os3 << "filter postcondition re-enumeration: " << recheck_violations << " violations over "
      << recheck_runs << " runs";
  report(3, recheck_runs == trials && recheck_violations == 0, os3.str());
}

void criteria_4_5_recovery(int reps) {
  const ScenarioConfig base = canonical(0);
  const MomentParams params = canonical_params(base);
  PipelineOptions opt;
  opt.filter.m_eff_override = harness_m_eff(params);

  const double ceiling = 20.0 *
                         std::pow(6.0 * std::pow(2.0, params.t) * 8.0 * params.moment_bound,
                                  1.0 / params.t) *
                         std::pow(params.alpha, -6.0 / params.t);
  const int rounds = default_rounds(params.alpha);

  int within_target = 0, under_ceiling = 0, beats_baseline = 0;
  double worst = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    ScenarioConfig cfg = base;
    cfg.seed = 7000 + static_cast<std::uint64_t>(rep);
    const GeneratedScenario s = gen_corrupted(cfg);
    const EstimateList list = estimate_list(s.data, params, rounds, cfg.seed, opt);
    const double err = min_list_error(list, s.mu_true);
    const double baseline = (s.data.samples.colwise().mean().transpose() - s.mu_true).norm();
    if (err <= 3.0) ++within_target;
    if (err <= ceiling) ++under_ceiling;
    if (err < baseline) ++beats_baseline;
    worst = std::max(worst, err);
  }

  std::ostringstream os4;
  os4 << "min_list_error <= 3.0 in " << within_target << "/" << reps << " (need >= " << (reps - 2)
      << "), worst " << worst << " vs ceiling " << ceiling;
  report(4, within_target >= reps - 2 && under_ceiling == reps, os4.str());

  std::ostringstream os5;
  os5 << "list beats contaminated sample mean in " << beats_baseline << "/" << reps
      << " (need >= " << (reps - 2) << ")";
  report(5, beats_baseline >= reps - 2, os5.str());
}

void criterion_6_variance() {
  bool ok = true;
  std::ostringstream os;
  Rng rng(606);
  const int draws = 100000;
  for (Index n : {Index{2}, Index{8}, Index{32}}) {
    for (int pair = 0; pair < 5; ++pair) {
      Eigen::VectorXd u(n), v(n);
      for (Index i = 0; i < n; ++i) {
        u[i] = rng.gaussian();
        v[i] = rng.gaussian();
      }
      double sum = 0.0, sumsq = 0.0;
      const std::uint64_t base = derive_seed(607, static_cast<std::uint64_t>(n) * 100 + pair);
      for (int d = 0; d < draws; ++d) {
        const Eigen::MatrixXd a = random_signed_permutation(n, derive_seed(base, d));
        const double z = u.dot(a * v);
        sum += z;
        sumsq += z * z;
      }
      const double mean = sum / draws;
      const double var = sumsq / draws - mean * mean;
      const double target = u.squaredNorm() * v.squaredNorm() / static_cast<double>(n);
      const double se = std::sqrt(var / draws);
      if (std::abs(var - target) > 0.05 * target || std::abs(mean) > 3.0 * se) {
        ok = false;
        os << " [n=" << n << " pair=" << pair << " var=" << var << " target=" << target
           << " mean=" << mean << " se=" << se << "]";
      }
    }
  }
  report(6, ok, "Var(<u, Av>) within 5% of |u|^2|v|^2/n and mean within 3 SE at n in {2,8,32}" +
                    os.str());
}

// Grid search over k-sparse unit directions, axis directions for k=1 and a
// fine angular grid per support for k=2.
double grid_search(const Eigen::MatrixXd& pts, int k, int t) {
  const Index n = pts.cols();
  double best = 0.0;
  auto eval = [&](const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Index i = 0; i < pts.rows(); ++i) s += std::pow(pts.row(i).dot(v), t);
    best = std::max(best, s);
  };
  for (Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[i] = 1.0;
    eval(v);
    v[i] = -1.0;
    eval(v);
  }
  if (k >= 2) {
    const double step = 1e-3;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        for (double theta = 0.0; theta < 2.0 * M_PI; theta += step) {
          Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
          v[i] = std::cos(theta);
          v[j] = std::sin(theta);
          eval(v);
        }
  }
  return best;
}

void criterion_7_oracle() {
  Rng rng(77);
  bool ok = true;
  std::ostringstream os;
  for (int rep = 0; rep < 50; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.uniform_int(2));  // 2..3
    const int k = 1 + static_cast<int>(rng.uniform_int(2));      // 1..2
    const int t = rng.uniform() < 0.5 ? 2 : 4;
    const Index m = 3 + static_cast<Index>(rng.uniform_int(6));
    Eigen::MatrixXd pts(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index c = 0; c < n; ++c) pts(i, c) = rng.uniform(-2.0, 2.0);

    const double grid = grid_search(pts, k, t);
    MatrixRows rows{&pts};
    double value;
    if (t == 2) {
      value = sparse_moment_max_exact_t2(rows, k).first;
    } else {
      value = sparse_moment_ascent(rows, k, t, 8, derive_seed(77, rep)).first;
    }
    const double rel = std::abs(value - grid) / std::max(1.0, std::abs(grid));
    if (rel > 1e-3) {
      ok = false;
      os << " [rep=" << rep << " t=" << t << " k=" << k << " oracle=" << value << " grid=" << grid
         << "]";
    }
  }
  report(7, ok, "oracles match grid search (step 1e-3) within 1e-3 relative on 50 point sets" +
                    os.str());
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void criterion_8_determinism(const std::string& cli) {
  const std::string dir = "acceptance_tmp";
  if (std::system(("mkdir -p " + dir).c_str()) != 0) {
    report(8, false, "could not create temp directory");
    return;
  }
  const std::string data = dir + "/det";
  const std::string common = " --n 12 --m 120 --k 2 --alpha 0.25 --mu-norm 6 --seed 31 ";
  int rc = std::system((cli + " generate" + common + "--out " + data + " > /dev/null").c_str());
  bool ok = rc == 0;
  std::string detail = "estimate JSON byte-identical across reruns and workers 1 vs 8";
  if (ok) {
    for (const char* run : {"w1a", "w1b", "w8"}) {
      const std::string workers = (run[1] == '8') ? "8" : "1";
      rc = std::system((cli + " estimate" + common + "--rounds 40 --workers " + workers +
                        " --input " + data + ".csv --out " + dir + "/" + run + " > /dev/null")
                           .c_str());
      if (rc != 0) ok = false;
    }
  }
  if (ok) {
    const std::string a = slurp(dir + "/w1a_list.json");
    const std::string b = slurp(dir + "/w1b_list.json");
    const std::string c = slurp(dir + "/w8_list.json");
    ok = !a.empty() && a == b && a == c;
    if (!ok) detail += " (outputs differ)";
  } else {
    detail += " (CLI invocation failed)";
  }
  report(8, ok, detail);
}

void criterion_9_truncation() {
  Rng rng(909);
  long long violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.uniform_int(15));
    const int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i) x[i] = rng.uniform(-5.0, 5.0);
    Eigen::VectorXd mu = detail::random_sparse_mean(n, k, rng.uniform(0.0, 8.0), rng);
    const double lhs = (hk_truncate(x, k) - mu).norm();
    const double rhs = 3.0 * two_k_norm(x - mu, k);
    if (lhs > rhs + 1e-9) ++violations;
  }
  std::ostringstream os;
  os << "|h_k(x) - mu| <= 3 |x - mu|_{2,k} on 1000 random pairs, " << violations << " violations";
  report(9, violations == 0, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  bool fast = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
    if (arg == "--fast") fast = true;
  }
  if (cli.empty()) {
    std::cerr << "usage: acceptance --cli /path/to/lsme [--fast]\n";
    return 2;
  }

  criterion_1_lemmas();
  criteria_2_3_filter(fast ? 12 : 60);
  criteria_4_5_recovery(fast ? 4 : 20);
  criterion_6_variance();
  criterion_7_oracle();
  criterion_8_determinism(cli);
  criterion_9_truncation();

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
