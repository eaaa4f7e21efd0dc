#pragma once

#include "pacopt/algorithms.hpp"
#include "pacopt/common.hpp"
#include "pacopt/problems.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace pacopt {

enum class BoundRegime { Guaranteed, Conditioned };

/**
 * Constants of the exponential-family bound. The natural parameter is
 * eta(lambda) = (lambda, -(lambda^2 / 2) * eta2_scale()), paired with the
 * learning statistic T = (-risk, T') where T' is the squared contraction
 * factor (Guaranteed) or 1 / p_hat^2 (Conditioned).
 */
struct StatisticsPlan {
  BoundRegime regime = BoundRegime::Conditioned;
  int n = 1;                          // training-set size
  double epsilon = 0.01;              // PAC confidence level
  double second_moment = 0.0;         // estimate of E[loss(x0, S)^2]
  double convergence_constant = 1.0;  // C of the Guaranteed regime

  double eta2_scale() const;
  void validate() const;
};

/**
 * Hyperparameter samples with their prior log-densities and, once computed,
 * the per-particle statistics. Excluded particles (p_hat = 0 or outside the
 * prior support) take no part in kappa, the objective, or the posterior.
 */
struct ParticleCloud {
  std::vector<HyperparameterPoint> particles;
  std::vector<double> prior_log_density;
  std::vector<std::array<double, 2>> statistics;
  std::vector<bool> excluded;

  std::size_t size() const { return particles.size(); }
  std::size_t active_count() const;
};

/** Evaluation inputs shared by every particle. */
struct EvaluationContext {
  AlgorithmSpec algorithm;
  Vector x0;
  // Spectral bounds valid for every instance of the family; used by the
  // Guaranteed regime's contraction factor.
  double spectrum_mu = 0.0;
  double spectrum_ell = 0.0;
};

/** Strictly increasing candidate lambdas in (0, 1]. */
struct LambdaGrid {
  std::vector<double> values;

  static LambdaGrid linear(std::size_t count);  // i / count, i = 1..count
  void validate() const;
};

enum class PosteriorWeighting {
  PriorDensity,    // weight ~ exp(prior log-density + <eta, T>)
  ImportanceOnly,  // weight ~ exp(<eta, T>)
};

struct PacLearningResult {
  double lambda_star = 0.0;
  double bound = 0.0;  // min_lambda objective
  double kappa_at_star = 0.0;
  double log_term = 0.0;  // log(|grid| / epsilon)
  std::vector<double> posterior_weights;
  std::size_t argmax_index = 0;
  HyperparameterPoint argmax_particle;
};

/** <eta(lambda), T> = lambda * t1 - (lambda^2 / 2) * eta2_scale * t2. */
double statistic_inner_product(const StatisticsPlan& plan, double lambda,
                               const std::array<double, 2>& statistic);

/**
 * Fills cloud.statistics from the training instances.
 * Guaranteed (gd only): T = (-empirical risk, rho^2); a non-finite risk maps
 * to t1 = -inf. Conditioned: T = (-convergence risk, 1 / p_hat^2) with p_hat
 * measured on the training instances; p_hat = 0 marks the particle excluded.
 */
void compute_statistics(const StatisticsPlan& plan, ParticleCloud& cloud,
                        const std::vector<ProblemInstance>& train, const EvaluationContext& ctx);

/**
 * log of the active-particle mean of exp(<eta(lambda), T>), computed with
 * max-subtraction so large exponents cannot overflow.
 */
double kappa_tilde(double lambda, const StatisticsPlan& plan, const ParticleCloud& cloud);

/** -(1 / lambda) * (kappa_tilde(lambda) - log(grid_cardinality / epsilon)). */
double objective_f(double lambda, const StatisticsPlan& plan, const ParticleCloud& cloud,
                   std::size_t grid_cardinality);

/** Exhaustive minimizer over the grid; ties resolve to the smallest lambda. */
std::pair<double, double> grid_search_lambda(const LambdaGrid& grid, const StatisticsPlan& plan,
                                             const ParticleCloud& cloud);

/**
 * Normalized Gibbs posterior weights at lambda. Excluded particles get weight
 * exactly 0. Invariant to adding a constant to every inner product and to
 * rescaling the prior density.
 */
std::vector<double> gibbs_posterior(double lambda, const StatisticsPlan& plan,
                                    const ParticleCloud& cloud,
                                    PosteriorWeighting weighting = PosteriorWeighting::PriorDensity);

/**
 * Full learning step: grid search, posterior, argmax particle (ties resolve
 * to the lowest index), and bound diagnostics.
 */
PacLearningResult pac_bound_report(const LambdaGrid& grid, const StatisticsPlan& plan,
                                   const ParticleCloud& cloud,
                                   PosteriorWeighting weighting = PosteriorWeighting::PriorDensity);

/** log(covering_number / epsilon) + c_modulus (finite grids cover themselves). */
double covering_bound(std::uint64_t covering_number, double c_modulus, double epsilon);

struct MomentCheckResult {
  double mean = 0.0;
  double std_error = 0.0;
};

struct MomentCheckSetup {
  ProblemDistributionConfig problem;
  AlgorithmSpec algorithm;  // Guaranteed regime: gd
  Vector x0;
  std::vector<HyperparameterPoint> particles;
  int dataset_size = 20;     // N of each synthetic dataset
  int heldout_size = 2000;   // sample used for true risks and the second moment
  double convergence_constant = 1.0;
};

/**
 * Monte-Carlo estimate of E over datasets of c(lambda) = mean over particles
 * of exp(<eta(lambda), T>), with T built from held-out risk estimates. The
 * PAC premise asserts the mean is <= 1.
 */
MomentCheckResult mc_check_exponential_moment(const MomentCheckSetup& setup, double lambda,
                                              int n_datasets, std::uint64_t seed);

/**
 * Donsker-Varadhan optimality of the Gibbs weights on the particle support:
 * V(Q) = E_Q[<eta, T>] - KL(Q || P) with P the normalized prior weights must
 * be maximal at the Gibbs posterior, and equal the discrete log-moment there.
 */
bool check_gibbs_optimality(double lambda, const StatisticsPlan& plan, const ParticleCloud& cloud,
                            int n_perturbations, std::uint64_t seed, double tolerance = 1e-9);

}  // namespace pacopt
