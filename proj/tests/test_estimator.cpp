#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "lsme/estimator.hpp"
#include "lsme/generate.hpp"

using namespace lsme;

namespace {

Dataset constant_dataset(Index m, Index n, double fill) {
  Dataset d;
  d.samples = Eigen::MatrixXd::Constant(m, n, fill);
  return d;
}

}  // namespace

TEST_CASE("ld_sparse_mean on identical points recovers the common point") {
  const Index m = 20, n = 4;
  Dataset d = constant_dataset(m, n, 1.5);
  MomentParams params;
  params.t = 2;
  params.k = 4;
  params.alpha = 0.45;
  params.moment_bound = 2.0;

  auto mu = ld_sparse_mean(d, params, 7);
  REQUIRE(mu.has_value());
  REQUIRE((*mu - Eigen::VectorXd::Constant(n, 1.5)).norm() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("ld_sparse_mean output is always k-sparse") {
  ScenarioConfig cfg;
  cfg.n = 10;
  cfg.m = 80;
  cfg.k = 2;
  cfg.alpha = 0.3;
  cfg.mu_norm = 6.0;
  cfg.adversary = Adversary::UniformNoise;
  cfg.seed = 11;
  Dataset d = gen_corrupted(cfg).data;

  MomentParams params;
  params.t = 2;
  params.k = 2;
  params.alpha = cfg.alpha;
  params.moment_bound = 2.0;
  PipelineOptions opt;
  opt.filter.m_eff_override = 2.0 * params.moment_bound;

  int produced = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto mu = ld_sparse_mean(d, params, seed, opt);
    if (!mu) continue;
    ++produced;
    Index nonzeros = 0;
    for (Index i = 0; i < mu->size(); ++i)
      if ((*mu)[i] != 0.0) ++nonzeros;
    REQUIRE(nonzeros <= params.k);
  }
  REQUIRE(produced > 0);
}

TEST_CASE("default_rounds") {
  REQUIRE(default_rounds(0.1) == 553);
  REQUIRE(default_rounds(0.2) == static_cast<int>(std::ceil(120.0 * std::log(10.0))));
  REQUIRE(default_rounds(0.5) >= 1);
}

TEST_CASE("estimate_list dedups candidates and counts failures") {
  const Index m = 16, n = 3;
  Dataset d = constant_dataset(m, n, -2.0);
  MomentParams params;
  params.t = 2;
  params.k = 3;
  params.alpha = 0.45;
  params.moment_bound = 2.0;

  const int rounds = 10;
  EstimateList list = estimate_list(d, params, rounds, 42);
  // Every successful round returns the identical point, so dedup keeps one.
  REQUIRE(list.candidates.size() <= 1);
  REQUIRE(static_cast<int>(list.candidates.size()) + list.fail_count <= rounds);
  REQUIRE(list.candidates.size() == list.seeds.size());
  if (!list.candidates.empty()) {
    // The retained seed is the earliest successful round's seed.
    REQUIRE(list.seeds[0] >= 43);
    REQUIRE(list.seeds[0] < 43 + rounds);
  }
  REQUIRE(list.fail_count >= 0);

  // With merge radius zero nothing is within strict distance 0 of anything,
  // so every successful round contributes a candidate.
  PipelineOptions opt;
  opt.merge_radius_override = 0.0;
  EstimateList all = estimate_list(d, params, rounds, 42, opt);
  REQUIRE(static_cast<int>(all.candidates.size()) + all.fail_count == rounds);
}

TEST_CASE("estimate_list rejects rounds < 1") {
  Dataset d = constant_dataset(4, 2, 0.0);
  MomentParams params;
  params.t = 2;
  params.k = 2;
  params.alpha = 0.4;
  REQUIRE_THROWS_AS(estimate_list(d, params, 0, 1), ParameterError);
}

TEST_CASE("estimate_list is identical across worker counts") {
  ScenarioConfig cfg;
  cfg.n = 8;
  cfg.m = 60;
  cfg.k = 2;
  cfg.alpha = 0.3;
  cfg.mu_norm = 5.0;
  cfg.adversary = Adversary::FarCluster;
  cfg.seed = 5;
  Dataset d = gen_corrupted(cfg).data;

  MomentParams params;
  params.t = 2;
  params.k = 2;
  params.alpha = cfg.alpha;
  params.moment_bound = 2.0;
  PipelineOptions seq;
  seq.filter.m_eff_override = 2.0 * params.moment_bound;
  PipelineOptions par = seq;
  par.workers = 4;

  const EstimateList a = estimate_list(d, params, 24, 99, seq);
  const EstimateList b = estimate_list(d, params, 24, 99, par);
  REQUIRE(a.fail_count == b.fail_count);
  REQUIRE(a.seeds == b.seeds);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i)
    REQUIRE((a.candidates[i] - b.candidates[i]).norm() == 0.0);
}

TEST_CASE("min_list_error") {
  Eigen::VectorXd mu(2);
  mu << 3.0, 0.0;

  EstimateList empty;
  REQUIRE(min_list_error(empty, mu) == std::numeric_limits<double>::infinity());

  EstimateList exact;
  exact.candidates.push_back(mu);
  REQUIRE(min_list_error(exact, mu) == 0.0);

  EstimateList origin;
  origin.candidates.push_back(Eigen::VectorXd::Zero(2));
  REQUIRE(min_list_error(origin, mu) == Catch::Approx(3.0));

  origin.candidates.push_back(mu);  // best of several
  REQUIRE(min_list_error(origin, mu) == 0.0);
}

TEST_CASE("merge_radius formula") {
  MomentParams params;
  params.t = 2;
  params.k = 1;
  params.alpha = 0.25;
  params.moment_bound = 4.0;
  REQUIRE(merge_radius(params) == Catch::Approx(2.0 * std::pow(0.25, -0.5)));
}
