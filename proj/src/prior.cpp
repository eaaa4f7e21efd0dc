#include "pacopt/prior.hpp"

#include "pacopt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pacopt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093453;
}  // namespace

MarginalDistribution MarginalDistribution::uniform(double lo, double hi) {
  require(lo < hi, "uniform support must have positive width");
  return {Kind::Uniform, lo, hi};
}

MarginalDistribution MarginalDistribution::gaussian(double mean, double stddev) {
  require(stddev > 0.0, "gaussian stddev must be positive");
  return {Kind::Gaussian, mean, stddev};
}

double MarginalDistribution::log_density(double x) const {
  if (kind == Kind::Uniform) {
    if (x < a || x > b) return kNegInf;
    return -std::log(b - a);
  }
  const double z = (x - a) / b;
  return -0.5 * z * z - std::log(b) - 0.5 * kLogTwoPi;
}

double MarginalDistribution::sample(std::mt19937_64& engine) const {
  if (kind == Kind::Uniform) {
    std::uniform_real_distribution<double> draw(a, b);
    return draw(engine);
  }
  std::normal_distribution<double> draw(a, b);
  return draw(engine);
}

double PriorSpec::log_density(const HyperparameterPoint& alpha) const {
  require(alpha.values().size() == marginals.size(),
          "hyperparameter names do not match the prior");
  double sum = 0.0;
  for (const auto& [name, marginal] : marginals) sum += marginal.log_density(alpha.at(name));
  return sum;
}

HyperparameterPoint PriorSpec::sample(std::mt19937_64& engine) const {
  require(!marginals.empty(), "prior has no marginals");
  HyperparameterPoint point;
  for (const auto& [name, marginal] : marginals) {
    double value = marginal.sample(engine);
    // Step sizes and momenta live on [0, inf); redraw the rare stray.
    if (name == "step_size" || name == "momentum")
      while (value < 0.0) value = marginal.sample(engine);
    point.set(name, value);
  }
  return point;
}

Interval initial_range(std::string_view hyperparameter, double epsilon_conv, double l_max,
                       double beta_std) {
  if (hyperparameter == "step_size") {
    require(epsilon_conv > 0.0, "convergence target must be positive");
    require(l_max > 0.0, "l_max must be positive");
    return {(0.5 / epsilon_conv) * (2.0 / l_max), (3.0 / epsilon_conv) * (2.0 / l_max)};
  }
  if (hyperparameter == "momentum") {
    require(beta_std > 0.0, "degenerate momentum range: worst-case momentum is 0");
    return {beta_std / 2.0, 2.0 * beta_std};
  }
  throw std::invalid_argument("no initial range is defined for: " + std::string(hyperparameter));
}

PriorConstructionError::PriorConstructionError(int round_index, const std::string& what)
    : std::runtime_error("prior construction failed in round " + std::to_string(round_index) +
                         ": " + what),
      round(round_index) {}

PriorBuildResult build_prior(const PriorBuildConfig& config, const AlgorithmSpec& algorithm,
                             const LambdaGrid& grid, const std::vector<ProblemInstance>& prior_1,
                             const std::vector<ProblemInstance>& prior_2, const Vector& x0,
                             std::uint64_t seed) {
  algorithm.validate();
  grid.validate();
  require(config.iterations >= 1, "need at least one construction round");
  require(config.n_particles >= 2, "need at least two particles per round");
  require(config.keep_fraction > 0.0 && config.keep_fraction <= 1.0,
          "keep_fraction must lie in (0, 1]");
  require(config.epsilon_conv > 0.0 && config.epsilon_conv <= 1.0,
          "epsilon_conv must lie in (0, 1]");
  require(!prior_1.empty() && !prior_2.empty(), "both prior partitions must be non-empty");

  PriorBuildResult result;
  PriorSpec spec;
  for (const auto& name : algorithm.hyperparameter_names) {
    const Interval range = initial_range(name, config.epsilon_conv, config.l_max, config.beta_std);
    spec.marginals[name] = MarginalDistribution::uniform(range.lo, range.hi);
  }
  result.round_specs.push_back(spec);

  StatisticsPlan plan;
  plan.regime = config.regime;
  plan.n = static_cast<int>(prior_1.size());
  plan.epsilon = config.epsilon;
  plan.second_moment = initial_loss_second_moment(prior_1, x0);

  EvaluationContext ctx;
  ctx.algorithm = algorithm;
  ctx.x0 = x0;

  std::vector<HyperparameterPoint> survivors;
  std::vector<double> survivor_p2;

  for (int round = 1; round <= config.iterations; ++round) {
    std::mt19937_64 engine(derive_seed(seed, "round/" + std::to_string(round)));
    ParticleCloud cloud;
    cloud.particles.reserve(static_cast<std::size_t>(config.n_particles));
    cloud.prior_log_density.reserve(static_cast<std::size_t>(config.n_particles));
    for (int i = 0; i < config.n_particles; ++i) {
      HyperparameterPoint point = spec.sample(engine);
      cloud.prior_log_density.push_back(spec.log_density(point));
      cloud.particles.push_back(std::move(point));
    }

    compute_statistics(plan, cloud, prior_1, ctx);
    std::vector<double> weights;
    try {
      const auto [lambda_star, value] = grid_search_lambda(grid, plan, cloud);
      weights = gibbs_posterior(lambda_star, plan, cloud);
    } catch (const std::domain_error& e) {
      throw PriorConstructionError(round, e.what());
    }

    // Convergence filter on the second prior split; it precedes retention.
    survivors.clear();
    survivor_p2.clear();
    std::vector<std::size_t> survivor_idx;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double p2 = estimate_p(cloud.particles[i], prior_2, algorithm, x0);
      if (p2 >= config.epsilon_conv) {
        survivor_idx.push_back(i);
        survivors.push_back(cloud.particles[i]);
        survivor_p2.push_back(p2);
      }
    }
    if (survivor_idx.empty())
      throw PriorConstructionError(round, "no particle met the convergence target");

    std::vector<std::size_t> order(survivor_idx.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return weights[survivor_idx[a]] > weights[survivor_idx[b]];
    });
    const std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(config.keep_fraction * static_cast<double>(order.size()))));
    order.resize(std::min(keep, order.size()));

    PriorSpec refit;
    for (const auto& name : algorithm.hyperparameter_names) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t j : order) {
        const double v = survivors[j].at(name);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(lo < hi))
        throw PriorConstructionError(round, "degenerate support for " + name);
      refit.marginals[name] = MarginalDistribution::uniform(lo, hi);
    }
    spec = std::move(refit);
    result.round_specs.push_back(spec);
  }

  result.spec = spec;
  result.survivors.particles = survivors;
  result.survivor_p_hat_prior_2 = survivor_p2;
  result.survivors.prior_log_density.reserve(survivors.size());
  result.survivors.excluded.reserve(survivors.size());
  for (const auto& point : survivors) {
    const double ld = result.spec.log_density(point);
    result.survivors.prior_log_density.push_back(ld);
    result.survivors.excluded.push_back(!std::isfinite(ld));
  }
  return result;
}

}  // namespace pacopt
