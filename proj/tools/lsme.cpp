#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lsme/estimator.hpp"
#include "lsme/generate.hpp"
#include "lsme/io.hpp"
#include "lsme/verify.hpp"

namespace {

struct CommonArgs {
  long long n = 16, m = 300;
  int k = 3, t = 2;
  double alpha = 0.2;
  double moment_bound = -1.0;  // <= 0: t^{t/2}
  double mu_norm = 8.0;
  std::string adversary = "sparse_mixture";
  int trials = 1;
  std::uint64_t seed = 0;
  int rounds = 0;  // 0: default_rounds(alpha)
  std::string trace_path;
  double enum_budget = 1e6;
  double m_eff = -1.0;  // <= 0: harness default M / 4
  int workers = 1;
  std::string config_path;
};

void add_common_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "plain key=value config file; flags override");
  cmd->add_option("--n", a.n, "ambient dimension");
  cmd->add_option("--m", a.m, "sample count");
  cmd->add_option("--k", a.k, "sparsity level");
  cmd->add_option("--t", a.t, "moment order (even)");
  cmd->add_option("--alpha", a.alpha, "inlier fraction in (0, 1/2)");
  cmd->add_option("--M", a.moment_bound, "moment bound M (default t^(t/2))");
  cmd->add_option("--mu-norm", a.mu_norm, "norm of the planted sparse mean");
  cmd->add_option("--adversary", a.adversary,
                  "far_cluster | sparse_mixture | mirror_shift | uniform_noise");
  cmd->add_option("--trials", a.trials, "trial count");
  cmd->add_option("--seed", a.seed, "RNG seed")->envname("LSME_SEED");
  cmd->add_option("--rounds", a.rounds, "estimation rounds (default ceil(24/alpha*ln 10))");
  cmd->add_option("--trace", a.trace_path, "filter trace output path (JSON-lines)");
  cmd->add_option("--enum-budget", a.enum_budget, "support enumeration budget");
  cmd->add_option("--m-eff", a.m_eff,
                  "effective moment bound for the filter threshold (default M/4)");
  cmd->add_option("--workers", a.workers, "parallel workers across rounds/trials");
}

// Flags override config file values, so the file only fills in what the
// command line left at its default.
void apply_config(CLI::App* cmd, CommonArgs& a) {
  if (a.config_path.empty()) return;
  const auto kv = lsme::read_config(a.config_path);
  auto set_if_default = [&](const char* flag, auto& field) {
    auto it = kv.find(flag);
    if (it == kv.end()) return;
    const CLI::Option* opt = cmd->get_option(std::string("--") + flag);
    if (opt && opt->count() > 0) return;
    std::stringstream ss(it->second);
    ss >> field;
  };
  set_if_default("n", a.n);
  set_if_default("m", a.m);
  set_if_default("k", a.k);
  set_if_default("t", a.t);
  set_if_default("alpha", a.alpha);
  set_if_default("M", a.moment_bound);
  set_if_default("mu-norm", a.mu_norm);
  set_if_default("adversary", a.adversary);
  set_if_default("trials", a.trials);
  set_if_default("seed", a.seed);
  set_if_default("rounds", a.rounds);
  set_if_default("enum-budget", a.enum_budget);
  set_if_default("m-eff", a.m_eff);
  set_if_default("workers", a.workers);
}

lsme::ScenarioConfig to_scenario(const CommonArgs& a) {
  lsme::ScenarioConfig cfg;
  cfg.n = a.n;
  cfg.m = a.m;
  cfg.k = a.k;
  cfg.t = a.t;
  cfg.alpha = a.alpha;
  cfg.moment_bound = a.moment_bound;
  cfg.mu_norm = a.mu_norm;
  cfg.adversary = lsme::adversary_from_string(a.adversary);
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  return cfg;
}

lsme::MomentParams to_params(const CommonArgs& a) {
  lsme::MomentParams p;
  p.t = a.t;
  p.k = a.k;
  p.alpha = a.alpha;
  p.moment_bound =
      a.moment_bound > 0.0 ? a.moment_bound : std::pow(static_cast<double>(a.t), a.t / 2.0);
  return p;
}

// Harness default filter threshold scale. The library's worst-case
// certification slack (2^t * 8 * M) makes the per-pair cap so loose that
// the filter never separates clusters at these sample sizes. M_eff = M/4
// puts the cap 6*M_eff = 1.5*M just above the t-th moment of inlier
// differences (2^{t/2} (t-1)!! for Gaussians, vs M = t^{t/2}), which is
// tight enough to strip cross-cluster pairs while keeping inlier pairs.
lsme::PipelineOptions to_pipeline(const CommonArgs& a, const lsme::MomentParams& p,
                                  std::ofstream* trace) {
  lsme::PipelineOptions opt;
  opt.filter.oracle.enum_budget = a.enum_budget;
  opt.filter.m_eff_override = a.m_eff > 0.0 ? a.m_eff : p.moment_bound / 4.0;
  opt.filter.trace = trace;
  opt.workers = a.workers;
  return opt;
}

int run_generate(CommonArgs& a, const std::string& out_prefix) {
  const auto scenario = lsme::gen_corrupted(to_scenario(a));
  lsme::write_dataset(scenario.data, out_prefix + ".csv");
  lsme::json mu;
  mu["mu"] = std::vector<double>(scenario.mu_true.begin(), scenario.mu_true.end());
  std::ofstream os(out_prefix + "_mu.json");
  os << mu.dump(2) << "\n";
  std::cout << "wrote " << out_prefix << ".csv (" << scenario.data.m() << "x" << scenario.data.n()
            << ", " << scenario.data.inlier_count() << " inliers) and " << out_prefix
            << "_mu.json\n";
  return 0;
}

int run_estimate(CommonArgs& a, const std::string& input, const std::string& out_prefix,
                 const std::string& mu_path) {
  const lsme::Dataset data = lsme::read_dataset(input);
  a.n = data.n();
  a.m = data.m();
  const lsme::MomentParams params = to_params(a);
  params.validate(data.n());

  std::ofstream trace;
  if (!a.trace_path.empty()) trace.open(a.trace_path);
  auto opt = to_pipeline(a, params, a.trace_path.empty() ? nullptr : &trace);

  const int rounds = a.rounds > 0 ? a.rounds : lsme::default_rounds(params.alpha);
  const auto list = lsme::estimate_list(data, params, rounds, a.seed, opt);

  std::ofstream os(out_prefix + "_list.json");
  os << lsme::estimate_list_to_json(list).dump() << "\n";

  lsme::json metrics;
  metrics["rounds"] = rounds;
  metrics["fail_count"] = list.fail_count;
  metrics["list_size"] = list.candidates.size();
  if (!mu_path.empty()) {
    std::ifstream mf(mu_path);
    lsme::json mu_json;
    mf >> mu_json;
    Eigen::VectorXd mu_true(data.n());
    const auto vals = mu_json.at("mu").get<std::vector<double>>();
    for (lsme::Index c = 0; c < data.n(); ++c) mu_true[c] = vals[static_cast<std::size_t>(c)];
    metrics["min_list_error"] = lsme::min_list_error(list, mu_true);
    metrics["sample_mean_error"] =
        (data.samples.colwise().mean().transpose() - mu_true).norm();
  }
  std::ofstream ms(out_prefix + "_metrics.json");
  ms << metrics.dump(2) << "\n";
  std::cout << "list size " << list.candidates.size() << ", " << list.fail_count << "/" << rounds
            << " rounds failed\n";
  return 0;
}

int run_verify(CommonArgs& a, int instances, const std::string& out_path) {
  const auto report = lsme::verify_lemmas(a.seed, instances);
  const auto j = lsme::report_to_json(report);
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out_path);
    os << j.dump(2) << "\n";
  }
  for (const auto& l : report.lemmas)
    std::cerr << (l.passed() ? "pass " : "FAIL ") << l.name << " (" << l.checks << " checks, "
              << l.failures << " failures)\n";
  return report.all_passed() ? 0 : 1;
}

int run_bench(CommonArgs& a, const std::string& alphas_csv, const std::string& adversaries_csv,
              const std::string& out_path) {
  std::vector<double> alphas;
  for (const auto& tok : lsme::detail::split_csv_line(alphas_csv)) alphas.push_back(std::stod(tok));
  std::vector<std::string> adversaries = lsme::detail::split_csv_line(adversaries_csv);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    os = &file;
  }
  *os << "alpha,adversary,trial,min_list_error,sample_mean_error,list_size,fail_count,rounds\n";
  for (double alpha : alphas) {
    for (const auto& adv : adversaries) {
      for (int trial = 0; trial < a.trials; ++trial) {
        CommonArgs at = a;
        at.alpha = alpha;
        at.adversary = adv;
        auto cfg = to_scenario(at);
        cfg.seed = lsme::derive_seed(a.seed, static_cast<std::uint64_t>(trial) * 1000 +
                                                 static_cast<std::uint64_t>(alpha * 100));
        const auto scenario = lsme::gen_corrupted(cfg);
        const lsme::MomentParams params = to_params(at);
        auto opt = to_pipeline(at, params, nullptr);
        const int rounds = at.rounds > 0 ? at.rounds : lsme::default_rounds(alpha);
        const auto list = lsme::estimate_list(scenario.data, params, rounds, cfg.seed, opt);
        const double err = lsme::min_list_error(list, scenario.mu_true);
        const double base =
            (scenario.data.samples.colwise().mean().transpose() - scenario.mu_true).norm();
        *os << alpha << "," << adv << "," << trial << "," << err << "," << base << ","
            << list.candidates.size() << "," << list.fail_count << "," << rounds << "\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"list-decodable sparse mean estimation harness"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out_prefix = "out";
  std::string input, mu_path, out_path;
  int instances = 200;
  std::string alphas_csv = "0.1,0.2,0.3";
  std::string adversaries_csv = "far_cluster,sparse_mixture,mirror_shift,uniform_noise";

  auto* gen = app.add_subcommand("generate", "generate a corrupted scenario (CSV + mu JSON)");
  add_common_flags(gen, args);
  gen->add_option("--out", out_prefix, "output prefix");

  auto* est = app.add_subcommand("estimate", "run the estimator on a dataset");
  add_common_flags(est, args);
  est->add_option("--input", input, "dataset path (.csv or .jsonl)")->required();
  est->add_option("--mu-true", mu_path, "ground-truth mean JSON for error metrics");
  est->add_option("--out", out_prefix, "output prefix");

  auto* ver = app.add_subcommand("verify", "run the lemma verification suite");
  add_common_flags(ver, args);
  ver->add_option("--instances", instances, "random instances");
  ver->add_option("--report", out_path, "report JSON path (default stdout)");

  auto* ben = app.add_subcommand("bench", "sweep scenarios, CSV of errors");
  add_common_flags(ben, args);
  ben->add_option("--alphas", alphas_csv, "comma-separated alpha values");
  ben->add_option("--adversaries", adversaries_csv, "comma-separated adversary names");
  ben->add_option("--out", out_path, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      apply_config(gen, args);
      return run_generate(args, out_prefix);
    }
    if (est->parsed()) {
      apply_config(est, args);
      return run_estimate(args, input, out_prefix, mu_path);
    }
    if (ver->parsed()) {
      apply_config(ver, args);
      return run_verify(args, instances, out_path);
    }
    if (ben->parsed()) {
      apply_config(ben, args);
      return run_bench(args, alphas_csv, adversaries_csv, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
