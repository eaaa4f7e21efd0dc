#pragma once

#include "pacopt/config.hpp"
#include "pacopt/pacbayes.hpp"
#include "pacopt/prior.hpp"
#include "pacopt/problems.hpp"

#include <string>
#include <vector>

namespace pacopt {

/**
 * Experiment drivers. Each resolves its defaults from the RunConfig, runs
 * deterministically from the master seed, and writes CSV files (header row
 * plus a provenance comment) into the output directory. Reruns with the same
 * config produce byte-identical files.
 */

struct PosteriorConvergenceRow {
  int n_iterations = 0;
  double lambda_star = 0.0;
  double bound = 0.0;
  double argmax_step_size = 0.0;
  double alpha_std = 0.0;
  double abs_distance_to_std = 0.0;
  double max_positive_weight_step = 0.0;  // largest step size carrying weight > 0
};

struct PosteriorConvergenceOutcome {
  std::vector<PosteriorConvergenceRow> rows;
  double step_cap = 0.0;  // 2 / L of the problem family
};

/**
 * Fixed-spectrum GD study in the Guaranteed regime: one particle cloud from a
 * Gaussian over step sizes (truncated to the stable region (0, 2/L]), one
 * posterior per unroll length.
 */
PosteriorConvergenceOutcome run_posterior_convergence(const RunConfig& config);

struct ConditioningCurve {
  double epsilon_conv = 0.0;  // 0 marks the worst-case-tuned reference curve
  std::vector<double> mean_losses;    // per iteration, over converged test instances
  std::vector<double> median_losses;  // per iteration, over converged test instances
  double p_hat_test = 0.0;
  HyperparameterPoint point;
};

struct ConditioningOutcome {
  std::vector<ConditioningCurve> curves;  // one per target, reference last
};

/**
 * Varying-spectrum heavy-ball study in the Conditioned regime: per
 * convergence target, builds the prior, learns, and traces the argmax
 * particle's test losses next to the worst-case-tuned reference.
 */
ConditioningOutcome run_conditioning(const RunConfig& config);

struct ConvergenceProbabilityRow {
  double target = 0.0;
  int test_set_index = 0;
  double p_hat = 0.0;
};

struct ConvergenceProbabilityOutcome {
  std::vector<ConvergenceProbabilityRow> rows;
};

/**
 * Per convergence target, learns once and measures the argmax particle's
 * empirical convergence probability on pre-generated shared test sets.
 */
ConvergenceProbabilityOutcome run_convergence_probability(const RunConfig& config);

struct PacBoundOutcome {
  double bound = 0.0;
  double lambda_star = 0.0;
  double learned_test_mean_converged = 0.0;  // mean final loss over converged test instances
  double learned_test_mean_all = 0.0;        // unconditional mean (may be non-finite)
  double learned_p_hat_test = 0.0;
  double standard_test_mean = 0.0;
  HyperparameterPoint learned_point;
  HyperparameterPoint standard_point;
};

/**
 * Single-target conditioned run that reports the PAC bound next to the test
 * losses of the learned and worst-case-tuned hyperparameters.
 */
PacBoundOutcome run_pac_bound(const RunConfig& config);

struct LearnOutcome {
  BoundRegime regime = BoundRegime::Conditioned;
  PacLearningResult result;
  std::size_t n_particles = 0;
  // Posterior-weighted mean of each hyperparameter (diagnostic companion to
  // the argmax point reported in `result`).
  std::vector<std::pair<std::string, double>> posterior_mean;
};

/** Plain learning run on a generated (or loaded) dataset; writes the bound report. */
LearnOutcome run_learn(const RunConfig& config);

/** Dataset generation for the `gen` subcommand. */
void run_generate(const RunConfig& config, const std::string& out_path);

/** Resolved output directory: config value, else PACOPT_OUT_DIR, else "pacopt_out". */
std::string resolve_out_dir(const RunConfig& config);

}  // namespace pacopt
