// pacopt: PAC-Bayes hyperparameter learning for unrolled first-order optimizers.
//
// Subcommands:
//   gen      write a dataset file
//   learn    one learning pass; writes posterior.csv and bound_report.csv
//   exp      full experiment drivers (posterior-convergence, conditioning,
//            conv-prob, pac-bound)
//   verify   Monte-Carlo checks of the bound premises
//
// Every run is deterministic in (config, seed); CSV outputs carry a
// provenance comment with the config hash and seed.

#include "CLI11.hpp"

#include "pacopt/experiments.hpp"
#include "pacopt/verify.hpp"

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string seed;
  std::string out_dir;
  std::string data_file;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_outputs = true) {
  cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
  cmd->add_option("--set", opts.overrides, "Override a config key (key=value), repeatable");
  cmd->add_option("--seed", opts.seed, "Master seed (overrides the config)");
  if (with_outputs) {
    cmd->add_option("--out", opts.out_dir, "Output directory for CSV files");
    cmd->add_option("--data", opts.data_file, "Load this dataset file instead of generating");
  }
}

pacopt::RunConfig build_config(const CommonOpts& opts) {
  pacopt::RunConfig rc = opts.config_path.empty()
                             ? pacopt::RunConfig()
                             : pacopt::RunConfig::from_file(opts.config_path);
  for (const std::string& kv : opts.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    rc.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!opts.seed.empty()) rc.set("seed", opts.seed);
  if (!opts.out_dir.empty()) rc.set("out_dir", opts.out_dir);
  if (!opts.data_file.empty()) rc.set("data_file", opts.data_file);
  return rc;
}

void print_point(const pacopt::HyperparameterPoint& point) {
  for (const auto& [name, value] : point.values())
    std::cout << "  " << name << " = " << pacopt::format_double(value) << "\n";
}

int run_exp(const std::string& which, const pacopt::RunConfig& rc) {
  if (which == "posterior-convergence") {
    const auto outcome = pacopt::run_posterior_convergence(rc);
    for (const auto& row : outcome.rows)
      std::cout << "n_iterations=" << row.n_iterations
                << " lambda_star=" << pacopt::format_double(row.lambda_star)
                << " bound=" << pacopt::format_double(row.bound)
                << " argmax_step=" << pacopt::format_double(row.argmax_step_size)
                << " |argmax - alpha_std|=" << pacopt::format_double(row.abs_distance_to_std)
                << "\n";
  } else if (which == "conditioning") {
    const auto outcome = pacopt::run_conditioning(rc);
    for (const auto& curve : outcome.curves) {
      if (curve.epsilon_conv > 0.0)
        std::cout << "epsilon_conv=" << pacopt::format_double(curve.epsilon_conv);
      else
        std::cout << "worst-case reference";
      std::cout << " p_hat_test=" << pacopt::format_double(curve.p_hat_test)
                << " final_mean=" << pacopt::format_double(curve.mean_losses.back()) << "\n";
    }
  } else if (which == "conv-prob") {
    const auto outcome = pacopt::run_convergence_probability(rc);
    std::size_t violations = 0;
    for (const auto& row : outcome.rows)
      if (row.p_hat < row.target) ++violations;
    std::cout << outcome.rows.size() << " test-set evaluations, " << violations
              << " below their target\n";
  } else if (which == "pac-bound") {
    const auto outcome = pacopt::run_pac_bound(rc);
    std::cout << "bound=" << pacopt::format_double(outcome.bound)
              << " lambda_star=" << pacopt::format_double(outcome.lambda_star) << "\n"
              << "learned test mean (converged)="
              << pacopt::format_double(outcome.learned_test_mean_converged)
              << " p_hat_test=" << pacopt::format_double(outcome.learned_p_hat_test) << "\n"
              << "standard test mean=" << pacopt::format_double(outcome.standard_test_mean)
              << "\n";
    std::cout << "learned point:\n";
    print_point(outcome.learned_point);
  } else {
    throw std::invalid_argument("unknown experiment: " + which);
  }
  std::cout << "output directory: " << pacopt::resolve_out_dir(rc) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC-Bayes hyperparameter learning for unrolled first-order optimizers"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate a dataset file");
  add_common(gen, gen_opts, /*with_outputs=*/false);
  gen->add_option("--out", gen_out, "Dataset file to write")->required();

  CommonOpts learn_opts;
  bool learn_posterior_mean = false;
  CLI::App* learn = app.add_subcommand("learn", "Run one learning pass");
  add_common(learn, learn_opts);
  learn->add_flag("--posterior-mean", learn_posterior_mean,
                  "Also report the posterior-weighted mean of each hyperparameter");

  CLI::App* exp = app.add_subcommand("exp", "Run an experiment driver");
  exp->require_subcommand(1);
  const std::vector<std::string> experiment_names{"posterior-convergence", "conditioning",
                                                  "conv-prob", "pac-bound"};
  std::vector<CommonOpts> exp_opts(experiment_names.size());
  std::vector<CLI::App*> exp_subs;
  for (std::size_t i = 0; i < experiment_names.size(); ++i) {
    CLI::App* sub = exp->add_subcommand(experiment_names[i]);
    add_common(sub, exp_opts[i]);
    exp_subs.push_back(sub);
  }

  CommonOpts verify_opts;
  CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo checks of the bound premises");
  add_common(verify, verify_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      pacopt::run_generate(build_config(gen_opts), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }
    if (learn->parsed()) {
      const pacopt::RunConfig rc = build_config(learn_opts);
      const pacopt::LearnOutcome outcome = pacopt::run_learn(rc);
      std::cout << "regime="
                << (outcome.regime == pacopt::BoundRegime::Guaranteed ? "guaranteed"
                                                                      : "conditioned")
                << " lambda_star=" << pacopt::format_double(outcome.result.lambda_star)
                << " bound=" << pacopt::format_double(outcome.result.bound) << "\n";
      std::cout << "learned point:\n";
      print_point(outcome.result.argmax_particle);
      if (learn_posterior_mean) {
        std::cout << "posterior mean:\n";
        for (const auto& [name, value] : outcome.posterior_mean)
          std::cout << "  " << name << " = " << pacopt::format_double(value) << "\n";
      }
      std::cout << "output directory: " << pacopt::resolve_out_dir(rc) << "\n";
      return 0;
    }
    if (exp->parsed()) {
      for (std::size_t i = 0; i < exp_subs.size(); ++i)
        if (exp_subs[i]->parsed()) return run_exp(experiment_names[i], build_config(exp_opts[i]));
    }
    if (verify->parsed()) {
      const auto lines = pacopt::run_verification(build_config(verify_opts));
      bool all_ok = true;
      for (const auto& line : lines) {
        std::cout << (line.ok ? "ok   " : "FAIL ") << line.name << "  (" << line.detail << ")\n";
        all_ok = all_ok && line.ok;
      }
      return all_ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
