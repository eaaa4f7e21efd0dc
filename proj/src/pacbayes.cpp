#include "pacopt/pacbayes.hpp"

#include "pacopt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace pacopt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_statistics(const ParticleCloud& cloud) {
  require(cloud.size() > 0, "particle cloud is empty");
  require(cloud.statistics.size() == cloud.size(), "statistics have not been computed");
  require(cloud.excluded.size() == cloud.size(), "exclusion flags missing");
}

void require_densities(const ParticleCloud& cloud) {
  require(cloud.prior_log_density.size() == cloud.size(), "prior log-densities missing");
}

std::vector<std::size_t> active_indices(const ParticleCloud& cloud) {
  std::vector<std::size_t> idx;
  idx.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (!cloud.excluded[i]) idx.push_back(i);
  return idx;
}

void check_lambda(double lambda) {
  require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
}

}  // namespace

double StatisticsPlan::eta2_scale() const {
  const double base = second_moment / static_cast<double>(n);
  if (regime == BoundRegime::Guaranteed) return convergence_constant * convergence_constant * base;
  return base;
}

void StatisticsPlan::validate() const {
  require(n >= 1, "training-set size must be at least 1");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(second_moment >= 0.0, "second moment must be non-negative");
  if (regime == BoundRegime::Guaranteed)
    require(convergence_constant > 0.0, "convergence constant must be positive");
}

std::size_t ParticleCloud::active_count() const {
  std::size_t count = 0;
  for (bool e : excluded) count += e ? 0 : 1;
  return count;
}

LambdaGrid LambdaGrid::linear(std::size_t count) {
  require(count >= 1, "grid must contain at least one lambda");
  LambdaGrid grid;
  grid.values.reserve(count);
  for (std::size_t i = 1; i <= count; ++i)
    grid.values.push_back(static_cast<double>(i) / static_cast<double>(count));
  return grid;
}

void LambdaGrid::validate() const {
  require(!values.empty(), "lambda grid is empty");
  double previous = 0.0;
  for (double v : values) {
    require(v > previous, "lambda grid must be strictly increasing and positive");
    previous = v;
  }
  require(values.back() <= 1.0, "lambda grid must stay within (0, 1]");
}

double statistic_inner_product(const StatisticsPlan& plan, double lambda,
                               const std::array<double, 2>& statistic) {
  return lambda * statistic[0] - 0.5 * lambda * lambda * plan.eta2_scale() * statistic[1];
}

void compute_statistics(const StatisticsPlan& plan, ParticleCloud& cloud,
                        const std::vector<ProblemInstance>& train, const EvaluationContext& ctx) {
  plan.validate();
  ctx.algorithm.validate();
  require(cloud.size() > 0, "particle cloud is empty");
  require(!train.empty(), "training partition is empty");
  if (plan.regime == BoundRegime::Guaranteed) {
    require(ctx.algorithm.name == "gd",
            "unsupported regime: the Guaranteed regime requires an analytic contraction factor "
            "and is available for gd only");
    require(ctx.spectrum_mu > 0.0 && ctx.spectrum_ell >= ctx.spectrum_mu,
            "Guaranteed regime needs the family's spectral bounds");
  }

  cloud.statistics.assign(cloud.size(), {0.0, 0.0});
  if (cloud.excluded.size() != cloud.size()) cloud.excluded.assign(cloud.size(), false);
  if (cloud.prior_log_density.size() == cloud.size()) {
    // Outside the prior support means outside the posterior support.
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if (!std::isfinite(cloud.prior_log_density[i])) cloud.excluded[i] = true;
  }

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.excluded[i]) continue;
    const RiskRecord record = evaluate_record(cloud.particles[i], train, ctx.algorithm, ctx.x0);
    if (plan.regime == BoundRegime::Guaranteed) {
      const double risk = empirical_risk(record);
      const double rho = gd_contraction_rho(cloud.particles[i], ctx.spectrum_mu, ctx.spectrum_ell,
                                            ctx.algorithm.n_iterations);
      // A divergent mean loss carries no information beyond "infinitely bad";
      // -inf keeps the particle at posterior weight zero without NaNs.
      cloud.statistics[i] = {std::isfinite(risk) ? -risk : kNegInf, rho * rho};
    } else {
      const double p_hat = estimate_p(record);
      if (p_hat <= 0.0) {
        cloud.excluded[i] = true;
        continue;
      }
      const double risk = empirical_convergence_risk(record, p_hat);
      cloud.statistics[i] = {-risk, 1.0 / (p_hat * p_hat)};
    }
  }
}

double kappa_tilde(double lambda, const StatisticsPlan& plan, const ParticleCloud& cloud) {
  check_lambda(lambda);
  plan.validate();
  require_statistics(cloud);
  const auto active = active_indices(cloud);
  if (active.empty()) throw std::domain_error("all particles are excluded");

  double max_score = kNegInf;
  for (std::size_t i : active)
    max_score = std::max(max_score, statistic_inner_product(plan, lambda, cloud.statistics[i]));
  if (max_score == kNegInf) return kNegInf;

  double sum = 0.0;
  for (std::size_t i : active)
    sum += std::exp(statistic_inner_product(plan, lambda, cloud.statistics[i]) - max_score);
  return max_score + std::log(sum / static_cast<double>(active.size()));
}

double objective_f(double lambda, const StatisticsPlan& plan, const ParticleCloud& cloud,
                   std::size_t grid_cardinality) {
  require(grid_cardinality >= 1, "grid cardinality must be at least 1");
  const double log_term = std::log(static_cast<double>(grid_cardinality) / plan.epsilon);
  return -(kappa_tilde(lambda, plan, cloud) - log_term) / lambda;
}

std::pair<double, double> grid_search_lambda(const LambdaGrid& grid, const StatisticsPlan& plan,
                                             const ParticleCloud& cloud) {
  grid.validate();
  double best_lambda = grid.values.front();
  double best_value = std::numeric_limits<double>::infinity();
  for (double lambda : grid.values) {
    const double value = objective_f(lambda, plan, cloud, grid.values.size());
    if (value < best_value) {  // strict: ties resolve to the smallest lambda
      best_value = value;
      best_lambda = lambda;
    }
  }
  return {best_lambda, best_value};
}

std::vector<double> gibbs_posterior(double lambda, const StatisticsPlan& plan,
                                    const ParticleCloud& cloud, PosteriorWeighting weighting) {
  check_lambda(lambda);
  plan.validate();
  require_statistics(cloud);
  if (weighting == PosteriorWeighting::PriorDensity) require_densities(cloud);
  const auto active = active_indices(cloud);
  if (active.empty()) throw std::domain_error("all particles are excluded");

  std::vector<double> log_weight(cloud.size(), kNegInf);
  double max_log = kNegInf;
  for (std::size_t i : active) {
    double lw = statistic_inner_product(plan, lambda, cloud.statistics[i]);
    if (weighting == PosteriorWeighting::PriorDensity) lw += cloud.prior_log_density[i];
    log_weight[i] = lw;
    max_log = std::max(max_log, lw);
  }
  if (max_log == kNegInf)
    throw std::domain_error("posterior degenerate: every active particle has vanishing weight");

  std::vector<double> weights(cloud.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i : active) {
    weights[i] = std::exp(log_weight[i] - max_log);
    sum += weights[i];
  }
  for (std::size_t i : active) weights[i] /= sum;
  return weights;
}

PacLearningResult pac_bound_report(const LambdaGrid& grid, const StatisticsPlan& plan,
                                   const ParticleCloud& cloud, PosteriorWeighting weighting) {
  PacLearningResult result;
  auto [lambda_star, bound] = grid_search_lambda(grid, plan, cloud);
  result.lambda_star = lambda_star;
  result.bound = bound;
  result.kappa_at_star = kappa_tilde(lambda_star, plan, cloud);
  result.log_term = std::log(static_cast<double>(grid.values.size()) / plan.epsilon);
  result.posterior_weights = gibbs_posterior(lambda_star, plan, cloud, weighting);
  result.argmax_index = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < result.posterior_weights.size(); ++i) {
    if (result.posterior_weights[i] > best) {  // strict: ties resolve to the lowest index
      best = result.posterior_weights[i];
      result.argmax_index = i;
    }
  }
  result.argmax_particle = cloud.particles[result.argmax_index];
  return result;
}

double covering_bound(std::uint64_t covering_number, double c_modulus, double epsilon) {
  require(covering_number >= 1, "covering number must be at least 1");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  return std::log(static_cast<double>(covering_number) / epsilon) + c_modulus;
}

MomentCheckResult mc_check_exponential_moment(const MomentCheckSetup& setup, double lambda,
                                              int n_datasets, std::uint64_t seed) {
  require(lambda >= 0.0, "lambda must be non-negative");
  require(n_datasets >= 1, "need at least one dataset");
  require(!setup.particles.empty(), "need at least one particle");
  require(setup.dataset_size >= 1 && setup.heldout_size >= 1, "sample sizes must be positive");
  require(setup.algorithm.name == "gd",
          "unsupported regime: the exponential-moment check covers the Guaranteed regime (gd)");
  setup.problem.validate();

  const auto heldout =
      sample_instances(setup.problem, static_cast<std::size_t>(setup.heldout_size),
                       derive_seed(seed, "heldout"));
  const double second_moment = initial_loss_second_moment(heldout, setup.x0);

  // Spectral bounds valid for every instance of the family.
  double mu = setup.problem.mu_fixed;
  double ell = setup.problem.l_max;
  if (setup.problem.family == SpectrumFamily::FixedSpectrum) {
    mu = heldout.front().mu();
    ell = heldout.front().ell();
  }

  StatisticsPlan plan;
  plan.regime = BoundRegime::Guaranteed;
  plan.n = setup.dataset_size;
  plan.second_moment = second_moment;
  plan.convergence_constant = setup.convergence_constant;

  const std::size_t m = setup.particles.size();
  std::vector<double> true_risk(m);
  std::vector<double> deficit(m);
  for (std::size_t i = 0; i < m; ++i) {
    true_risk[i] = empirical_risk(setup.particles[i], heldout, setup.algorithm, setup.x0);
    const double rho =
        gd_contraction_rho(setup.particles[i], mu, ell, setup.algorithm.n_iterations);
    deficit[i] = 0.5 * lambda * lambda * plan.eta2_scale() * rho * rho;
  }

  std::vector<double> c_values;
  c_values.reserve(static_cast<std::size_t>(n_datasets));
  for (int d = 0; d < n_datasets; ++d) {
    const auto data =
        sample_instances(setup.problem, static_cast<std::size_t>(setup.dataset_size),
                         derive_seed(seed, "dataset/" + std::to_string(d)));
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double risk_hat = empirical_risk(setup.particles[i], data, setup.algorithm, setup.x0);
      sum += std::exp(lambda * (true_risk[i] - risk_hat) - deficit[i]);
    }
    c_values.push_back(sum / static_cast<double>(m));
  }

  MomentCheckResult result;
  for (double c : c_values) result.mean += c;
  result.mean /= static_cast<double>(c_values.size());
  if (c_values.size() > 1) {
    double ss = 0.0;
    for (double c : c_values) ss += (c - result.mean) * (c - result.mean);
    result.std_error = std::sqrt(ss / static_cast<double>(c_values.size() - 1)) /
                       std::sqrt(static_cast<double>(c_values.size()));
  }
  return result;
}

namespace {

// V(Q) = E_Q[<eta, T>] - KL(Q || P) on the active support.
double variational_value(const std::vector<double>& q, const std::vector<double>& scores,
                         const std::vector<double>& log_p) {
  double value = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;  // 0 * log 0 = 0
    if (scores[i] == kNegInf) return kNegInf;
    value += q[i] * scores[i] - q[i] * (std::log(q[i]) - log_p[i]);
  }
  return value;
}

}  // namespace

bool check_gibbs_optimality(double lambda, const StatisticsPlan& plan, const ParticleCloud& cloud,
                            int n_perturbations, std::uint64_t seed, double tolerance) {
  check_lambda(lambda);
  require(n_perturbations >= 0, "perturbation count must be non-negative");
  require_statistics(cloud);
  require_densities(cloud);
  const auto active = active_indices(cloud);
  if (active.empty()) throw std::domain_error("all particles are excluded");
  const std::size_t m = active.size();

  // Normalized prior masses on the support.
  std::vector<double> log_p(m);
  double max_lf = kNegInf;
  for (std::size_t j = 0; j < m; ++j) max_lf = std::max(max_lf, cloud.prior_log_density[active[j]]);
  double z = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    z += std::exp(cloud.prior_log_density[active[j]] - max_lf);
  const double log_z = max_lf + std::log(z);
  for (std::size_t j = 0; j < m; ++j) log_p[j] = cloud.prior_log_density[active[j]] - log_z;

  std::vector<double> scores(m);
  for (std::size_t j = 0; j < m; ++j)
    scores[j] = statistic_inner_product(plan, lambda, cloud.statistics[active[j]]);

  const auto full_gibbs = gibbs_posterior(lambda, plan, cloud, PosteriorWeighting::PriorDensity);
  std::vector<double> gibbs(m);
  for (std::size_t j = 0; j < m; ++j) gibbs[j] = full_gibbs[active[j]];

  // The supremum value is the discrete log-moment under P.
  double max_term = kNegInf;
  for (std::size_t j = 0; j < m; ++j) max_term = std::max(max_term, log_p[j] + scores[j]);
  double kappa_sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) kappa_sum += std::exp(log_p[j] + scores[j] - max_term);
  const double kappa_discrete = max_term + std::log(kappa_sum);

  const double v_gibbs = variational_value(gibbs, scores, log_p);
  if (std::abs(v_gibbs - kappa_discrete) > tolerance * std::max(1.0, std::abs(kappa_discrete)))
    return false;

  std::mt19937_64 engine(seed);
  std::exponential_distribution<double> exponential(1.0);
  std::vector<double> q(m);
  for (int t = 0; t < n_perturbations; ++t) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      q[j] = exponential(engine);
      sum += q[j];
    }
    for (std::size_t j = 0; j < m; ++j) q[j] /= sum;
    if (t % 2 == 1) {
      // Blend toward the optimum to probe the neighborhood as well.
      for (std::size_t j = 0; j < m; ++j) q[j] = 0.5 * q[j] + 0.5 * gibbs[j];
    }
    if (variational_value(q, scores, log_p) > v_gibbs + tolerance) return false;
  }
  return true;
}

}  // namespace pacopt
