// Command-line driver: simulate -> infer -> transforms -> experiment, all
// deterministic given (--config, --seed). Every sampler derives named
// substreams from the one master seed (see rng.hpp), so re-running any
// command reproduces its output files byte for byte.
//
// Exit codes: 0 success, 1 runtime/numeric error, 2 usage/config error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mg1bayes/arrival_inference.hpp"
#include "mg1bayes/asymptotics.hpp"
#include "mg1bayes/errors.hpp"
#include "mg1bayes/io.hpp"
#include "mg1bayes/queue_core.hpp"
#include "mg1bayes/service_inference.hpp"
#include "mg1bayes/transforms.hpp"

namespace fs = std::filesystem;
using namespace mg1bayes;

namespace {

struct Options {
  std::optional<std::string> config;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::optional<std::size_t> n;
  std::optional<std::size_t> draws;
  std::string kind;
  std::string data;
  std::string posterior;
};

std::string out_path(const Options& opt, const std::string& file) {
  fs::create_directories(opt.out);
  return (fs::path(opt.out) / file).string();
}

void cmd_simulate(const Options& opt) {
  io::RunConfig cfg = io::load_config(opt.config);
  std::size_t n = opt.n.value_or(cfg.n);
  SampleData data = simulate_mg1(cfg.truth, n, opt.seed);
  std::string path = out_path(opt, "sample.csv");
  io::write_sample_csv(path, data);
  std::cout << path << "\n";
}

void cmd_infer(const Options& opt) {
  io::RunConfig cfg = io::load_config(opt.config);
  SampleData data = io::read_sample_csv(opt.data);
  GammaPosterior lam_post = update_gamma(cfg.lambda_prior, data);
  BetaStacyState prior = io::make_service_prior(cfg.service_prior);
  BetaStacyState bs_post = data.services.empty() ? prior : posterior_update(prior, data);

  TailedValue mu = posterior_mean_of_mean(bs_post);
  io::InferSummary summary;
  summary.lambda_hat = bayes_lambda(lam_post);
  summary.mu_hat = mu.value;
  summary.mu_tail_warning = mu.tail_warning;
  summary.n_arrivals = data.inter_arrivals.size();
  summary.n_services = data.services.size();
  summary.rho_hat = summary.lambda_hat * summary.mu_hat;
  std::size_t k = opt.draws.value_or(cfg.draws);
  summary.stability = stability_probability(lam_post, bs_post, k, opt.seed);

  io::write_text_file(out_path(opt, "summary.json"), io::infer_summary_to_json(summary));
  io::write_text_file(out_path(opt, "ghat.csv"), io::grid_cdf_to_csv(bayes_cdf(bs_post)));
  io::write_text_file(out_path(opt, "posterior.json"),
                      io::posterior_to_json(lam_post, bs_post, cfg.service_prior));
  std::cout << out_path(opt, "summary.json") << "\n";
}

void cmd_transforms(const Options& opt) {
  auto [lam_post, bs_post] =
      io::parse_posterior_json(io::read_text_file(opt.posterior), opt.posterior);
  TransformSet set = build_transforms(lam_post, bs_post);
  std::string path = out_path(opt, "transforms.csv");
  io::write_text_file(path, io::transforms_to_csv(set, waiting_z_grid(), pgf_z_grid()));
  std::cout << path << "\n";
}

void cmd_experiment(const Options& opt) {
  io::RunConfig cfg = io::load_config(opt.config);
  std::size_t n = opt.n.value_or(cfg.n);
  std::size_t draws = opt.draws.value_or(cfg.draws);

  if (opt.kind == "consistency") {
    ConsistencySpec spec;
    spec.truth = cfg.truth;
    spec.lambda_prior = cfg.lambda_prior;
    spec.c_total = cfg.service_prior.c_total;
    spec.prior_guess = cfg.service_prior.guess;
    spec.cells = cfg.service_prior.cells;
    spec.n_list = cfg.n_list;
    spec.seeds = cfg.seeds;
    std::string path = out_path(opt, "consistency.csv");
    io::write_text_file(path, io::consistency_to_csv(consistency_experiment(spec)));
    std::cout << path << "\n";
    return;
  }
  if (opt.kind == "bvm-lambda") {
    BvmLambdaReport rep = bvm_lambda(cfg.truth.lambda0, n, draws, opt.seed, cfg.lambda_prior);
    std::string path = out_path(opt, "bvm_lambda.json");
    io::write_text_file(path, io::bvm_lambda_to_json(rep));
    std::cout << path << "\n";
    return;
  }
  BvmKind kind;
  std::string file;
  std::vector<double> grid = cfg.bvm_grid;
  if (opt.kind == "bvm-cdf") {
    kind = BvmKind::cdf;
    file = "bvm_cdf.json";
  } else if (opt.kind == "bvm-lst") {
    kind = BvmKind::lst;
    file = "bvm_lst.json";
  } else if (opt.kind == "bvm-mean") {
    kind = BvmKind::mean;
    file = "bvm_mean.json";
  } else if (opt.kind == "bvm-w") {
    kind = BvmKind::waiting_lst;
    file = "bvm_w.json";
    grid = cfg.w_grid;
  } else {
    throw ConfigError("unknown experiment kind '" + opt.kind +
                      "' (expected consistency, bvm-cdf, bvm-lst, bvm-mean, bvm-w, bvm-lambda)");
  }
  BetaStacyState prior = io::make_service_prior(cfg.service_prior);
  BvmReport rep =
      bvm_experiment(cfg.truth, cfg.lambda_prior, prior, n, draws, opt.seed, grid, kind);
  std::string path = out_path(opt, file);
  io::write_text_file(path, io::bvm_report_to_json(rep));
  std::cout << path << "\n";
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "INI config file (defaults used when omitted)");
  cmd->add_option("--seed", opt.seed, "master seed; all substreams derive from it");
  cmd->add_option("--out", opt.out, "output directory (created if missing)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric inference for the M/G/1 queue"};
  app.set_version_flag("--version", "mg1bayes 1.0.0 (config format v1)");
  app.require_subcommand(1);

  Options opt;
  CLI::App* sim = app.add_subcommand("simulate", "draw a synthetic dataset from the truth");
  add_common(sim, opt);
  sim->add_option("--n", opt.n, "number of customers (default: experiment.n)");

  CLI::App* infer = app.add_subcommand("infer", "fit both posteriors to a dataset");
  add_common(infer, opt);
  infer->add_option("--data", opt.data, "sample CSV (header a,s,censored)")->required();
  infer->add_option("--draws", opt.draws, "stability Monte Carlo draws (default: experiment.draws)");

  CLI::App* trans = app.add_subcommand("transforms", "evaluate plug-in transform estimates");
  add_common(trans, opt);
  trans->add_option("--posterior", opt.posterior, "posterior.json from infer")->required();

  CLI::App* exp = app.add_subcommand("experiment", "run a validation experiment");
  add_common(exp, opt);
  exp->add_option("--kind", opt.kind,
                  "consistency | bvm-cdf | bvm-lst | bvm-mean | bvm-w | bvm-lambda")
      ->required();
  exp->add_option("--n", opt.n, "dataset size override");
  exp->add_option("--draws", opt.draws, "posterior draw count override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) cmd_simulate(opt);
    if (infer->parsed()) cmd_infer(opt);
    if (trans->parsed()) cmd_transforms(opt);
    if (exp->parsed()) cmd_experiment(opt);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
