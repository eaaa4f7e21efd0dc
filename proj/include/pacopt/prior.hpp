#pragma once

#include "pacopt/algorithms.hpp"
#include "pacopt/common.hpp"
#include "pacopt/pacbayes.hpp"
#include "pacopt/problems.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace pacopt {

/** One hyperparameter's marginal: Uniform[lo, hi] or Gaussian(mean, stddev). */
struct MarginalDistribution {
  enum class Kind { Uniform, Gaussian };

  Kind kind = Kind::Uniform;
  double a = 0.0;  // Uniform: lo;  Gaussian: mean
  double b = 1.0;  // Uniform: hi;  Gaussian: stddev

  static MarginalDistribution uniform(double lo, double hi);
  static MarginalDistribution gaussian(double mean, double stddev);

  double log_density(double x) const;  // -inf outside a uniform's support
  double sample(std::mt19937_64& engine) const;
};

/** Independent product prior over named hyperparameters. */
struct PriorSpec {
  std::map<std::string, MarginalDistribution> marginals;

  double log_density(const HyperparameterPoint& alpha) const;
  HyperparameterPoint sample(std::mt19937_64& engine) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * Initial search range ahead of any data:
 *   step_size: [(0.5 / epsilon_conv) * (2 / l_max), (3 / epsilon_conv) * (2 / l_max)]
 *   momentum:  [beta_std / 2, 2 * beta_std]
 */
Interval initial_range(std::string_view hyperparameter, double epsilon_conv, double l_max,
                       double beta_std);

struct PriorBuildConfig {
  double epsilon_conv = 0.9;
  int iterations = 2;
  int n_particles = 200;
  double keep_fraction = 0.5;
  double l_max = 5000.0;
  double beta_std = 0.0;  // required when the algorithm has a momentum hyperparameter
  BoundRegime regime = BoundRegime::Conditioned;
  double epsilon = 0.01;  // PAC confidence used by the in-loop learning step
};

struct PriorBuildResult {
  PriorSpec spec;
  // Last round's filter survivors, with log-densities under the final spec;
  // survivors outside the refit box are marked excluded.
  ParticleCloud survivors;
  std::vector<double> survivor_p_hat_prior_2;
  std::vector<PriorSpec> round_specs;  // initial spec first, final spec last
};

struct PriorConstructionError : std::runtime_error {
  explicit PriorConstructionError(int round_index, const std::string& what);
  int round = 0;
};

/**
 * Iterative prior construction. Each round samples fresh particles from the
 * current spec, learns a Gibbs posterior on prior_1, drops every particle
 * whose convergence estimate on prior_2 falls below epsilon_conv (the filter
 * precedes density retention), keeps the keep_fraction highest-weight
 * survivors, and refits per-hyperparameter Uniform[min, max] boxes. The
 * procedure is contractive; a round with no survivors raises
 * PriorConstructionError carrying the round index.
 */
PriorBuildResult build_prior(const PriorBuildConfig& config, const AlgorithmSpec& algorithm,
                             const LambdaGrid& grid, const std::vector<ProblemInstance>& prior_1,
                             const std::vector<ProblemInstance>& prior_2, const Vector& x0,
                             std::uint64_t seed);

}  // namespace pacopt
