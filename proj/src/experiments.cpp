#include "pacopt/experiments.hpp"

#include "pacopt/csv.hpp"
#include "pacopt/dataset_io.hpp"
#include "pacopt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>

namespace pacopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

SpectrumFamily parse_family(const std::string& name) {
  if (name == "fixed") return SpectrumFamily::FixedSpectrum;
  if (name == "varying") return SpectrumFamily::VaryingSpectrum;
  throw std::invalid_argument("unknown problem family: " + name);
}

BoundRegime parse_regime(const std::string& name) {
  if (name == "guaranteed") return BoundRegime::Guaranteed;
  if (name == "conditioned") return BoundRegime::Conditioned;
  throw std::invalid_argument("unknown regime: " + name);
}

PosteriorWeighting parse_weighting(const std::string& name) {
  if (name == "prior-density") return PosteriorWeighting::PriorDensity;
  if (name == "importance") return PosteriorWeighting::ImportanceOnly;
  throw std::invalid_argument("unknown posterior weighting: " + name);
}

ProblemDistributionConfig resolve_problem(const RunConfig& rc, const std::string& default_family,
                                          std::uint64_t master_seed) {
  ProblemDistributionConfig pc;
  pc.n = static_cast<Index>(rc.get_int("problem.n", 50));
  pc.family = parse_family(rc.get("problem.family", default_family));
  pc.mu_fixed = rc.get_double("problem.mu_fixed", 0.05);
  pc.l_min = rc.get_double("problem.l_min", 1.0);
  pc.l_max = rc.get_double("problem.l_max", 5000.0);
  pc.seed = derive_seed(master_seed, "problem");
  auto [mean, cov] = make_rhs_moments(pc.n, derive_seed(pc.seed, "rhs_moments"));
  pc.rhs_mean = std::move(mean);
  pc.rhs_cov = std::move(cov);
  return pc;
}

PartitionCounts resolve_counts(const RunConfig& rc, const PartitionCounts& defaults) {
  PartitionCounts counts;
  counts.prior_1 = rc.get_uint("counts.prior_1", defaults.prior_1);
  counts.prior_2 = rc.get_uint("counts.prior_2", defaults.prior_2);
  counts.train = rc.get_uint("counts.train", defaults.train);
  counts.test = rc.get_uint("counts.test", defaults.test);
  return counts;
}

// Experiments read dataset files when given one and never write them back.
Dataset acquire_dataset(const RunConfig& rc, const ProblemDistributionConfig& pc,
                        const PartitionCounts& counts, std::uint64_t master_seed) {
  if (rc.has("data_file")) return read_dataset_file(rc.get("data_file", ""));
  return generate_dataset(pc, counts, derive_seed(master_seed, "data"));
}

void require_regime(const RunConfig& rc, const char* expected, const char* experiment) {
  const std::string regime = rc.get("regime", expected);
  if (regime != expected)
    throw std::invalid_argument(std::string(experiment) + " runs in the " + expected +
                                " regime, config says " + regime);
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

double median_of(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

struct TestTrace {
  std::vector<double> mean_losses;
  std::vector<double> median_losses;
  double p_hat = 0.0;
  std::size_t n_converged = 0;
};

// Per-iteration mean/median over the test instances that end up converged;
// a divergent instance would otherwise blank the whole curve.
TestTrace trace_on_instances(const AlgorithmSpec& alg, const std::vector<ProblemInstance>& tests,
                             const Vector& x0, const HyperparameterPoint& point) {
  require(!tests.empty(), "test partition is empty");
  const std::size_t n_steps = static_cast<std::size_t>(alg.n_iterations) + 1;
  std::vector<std::vector<double>> losses;
  losses.reserve(tests.size());
  std::vector<bool> keep(tests.size(), false);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    Trajectory t = unroll(alg, tests[i], x0, point);
    keep[i] = std::isfinite(t.losses.back()) && t.losses.back() <= t.losses.front();
    losses.push_back(std::move(t.losses));
  }
  TestTrace trace;
  for (bool k : keep) trace.n_converged += k ? 1 : 0;
  trace.p_hat = static_cast<double>(trace.n_converged) / static_cast<double>(tests.size());
  trace.mean_losses.resize(n_steps, kNaN);
  trace.median_losses.resize(n_steps, kNaN);
  for (std::size_t k = 0; k < n_steps; ++k) {
    std::vector<double> column;
    column.reserve(trace.n_converged);
    double sum = 0.0;
    for (std::size_t i = 0; i < tests.size(); ++i) {
      if (!keep[i]) continue;
      sum += losses[i][k];
      column.push_back(losses[i][k]);
    }
    if (!column.empty()) {
      trace.mean_losses[k] = sum / static_cast<double>(column.size());
      trace.median_losses[k] = median_of(std::move(column));
    }
  }
  return trace;
}

struct ConditionedLearnInputs {
  AlgorithmSpec algorithm;
  LambdaGrid grid;
  PosteriorWeighting weighting = PosteriorWeighting::PriorDensity;
  double epsilon = 0.01;
  double keep_fraction = 0.5;
  int prior_iterations = 2;
  int n_particles = 200;
  double l_max = 5000.0;
  double beta_std = 0.0;
};

ConditionedLearnInputs resolve_conditioned_inputs(const RunConfig& rc,
                                                  const ProblemDistributionConfig& pc) {
  ConditionedLearnInputs in;
  const std::string alg_name = rc.get("algorithm", "heavy_ball");
  const int iterations = static_cast<int>(rc.get_int("iterations", 50));
  in.algorithm = alg_name == "gd" ? AlgorithmSpec::gd(iterations)
                                  : AlgorithmSpec::heavy_ball(iterations);
  in.algorithm.name = alg_name;  // surface unknown names through validate()
  in.algorithm.validate();
  in.grid = LambdaGrid::linear(rc.get_uint("grid_size", 25000));
  in.weighting = parse_weighting(rc.get("weighting", "prior-density"));
  in.epsilon = rc.get_double("epsilon", 0.01);
  in.keep_fraction = rc.get_double("prior.keep_fraction", 0.5);
  in.prior_iterations = static_cast<int>(rc.get_int("prior.iterations", 2));
  in.n_particles = static_cast<int>(rc.get_int("particles", 200));
  in.l_max = pc.l_max;
  if (alg_name == "heavy_ball")
    in.beta_std = worst_case_hyperparameters("heavy_ball", pc.mu_fixed, pc.l_max).at("momentum");
  return in;
}

struct ConditionedLearnOutput {
  PacLearningResult report;
  ParticleCloud cloud;
};

// Prior construction on the prior splits, then one learning pass on train
// reweighting the filter survivors.
ConditionedLearnOutput learn_conditioned(const ConditionedLearnInputs& in, double epsilon_conv,
                                         const Dataset& ds, const Vector& x0,
                                         std::uint64_t seed) {
  require(epsilon_conv > 0.0 && epsilon_conv <= 1.0,
          "convergence target must lie in (0, 1]; the prior search range scales with 1 / target");
  PriorBuildConfig pbc;
  pbc.epsilon_conv = epsilon_conv;
  pbc.iterations = in.prior_iterations;
  pbc.n_particles = in.n_particles;
  pbc.keep_fraction = in.keep_fraction;
  pbc.l_max = in.l_max;
  pbc.beta_std = in.beta_std;
  pbc.regime = BoundRegime::Conditioned;
  pbc.epsilon = in.epsilon;
  PriorBuildResult built =
      build_prior(pbc, in.algorithm, in.grid, ds.prior_1, ds.prior_2, x0, seed);

  StatisticsPlan plan;
  plan.regime = BoundRegime::Conditioned;
  plan.n = static_cast<int>(ds.train.size());
  plan.epsilon = in.epsilon;
  plan.second_moment = initial_loss_second_moment(ds.prior_1, x0);

  EvaluationContext ctx;
  ctx.algorithm = in.algorithm;
  ctx.x0 = x0;

  ConditionedLearnOutput out;
  out.cloud = std::move(built.survivors);
  compute_statistics(plan, out.cloud, ds.train, ctx);
  out.report = pac_bound_report(in.grid, plan, out.cloud, in.weighting);
  return out;
}

// Step-size samples from a Gaussian conditioned on the stable region (0, cap].
ParticleCloud sample_truncated_gaussian_cloud(double center, double sigma, double cap,
                                              std::size_t n_particles, std::uint64_t seed) {
  const MarginalDistribution marginal = MarginalDistribution::gaussian(center, sigma);
  ParticleCloud cloud;
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> draw(center, sigma);
  for (std::size_t i = 0; i < n_particles; ++i) {
    double step = draw(engine);
    while (!(step > 0.0 && step <= cap)) step = draw(engine);
    HyperparameterPoint point{{"step_size", step}};
    cloud.prior_log_density.push_back(marginal.log_density(step));
    cloud.particles.push_back(std::move(point));
  }
  return cloud;
}

void write_posterior_csv(const std::string& path, std::uint64_t config_hash, std::uint64_t seed,
                         const ParticleCloud& cloud, const std::vector<double>& weights) {
  const bool with_momentum =
      !cloud.particles.empty() && cloud.particles.front().contains("momentum");
  std::vector<std::string> columns{"particle_index", "step_size"};
  if (with_momentum) columns.push_back("momentum");
  columns.push_back("posterior_weight");
  CsvWriter out(path, config_hash, seed, columns);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::vector<double> row{static_cast<double>(i), cloud.particles[i].at("step_size")};
    if (with_momentum) row.push_back(cloud.particles[i].at("momentum"));
    row.push_back(weights[i]);
    out.write_row(row);
  }
}

// Posterior-weighted mean of every hyperparameter carried by the cloud.
std::vector<std::pair<std::string, double>> posterior_mean_point(
    const ParticleCloud& cloud, const std::vector<double>& weights) {
  std::vector<std::pair<std::string, double>> means;
  if (cloud.particles.empty()) return means;
  for (const auto& [name, unused] : cloud.particles.front().values()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      acc += weights[i] * cloud.particles[i].at(name);
    means.emplace_back(name, acc);
  }
  return means;
}

void write_bound_report_csv(const std::string& path, std::uint64_t config_hash,
                            std::uint64_t seed, const std::string& regime,
                            const PacLearningResult& result, std::size_t n_particles) {
  CsvWriter report(path, config_hash, seed,
                   {"regime", "lambda_star", "bound", "kappa_at_star", "log_term", "n_particles",
                    "seed"});
  report.write_row(std::vector<std::string>{
      regime, format_double(result.lambda_star), format_double(result.bound),
      format_double(result.kappa_at_star), format_double(result.log_term),
      std::to_string(n_particles), std::to_string(seed)});
}

}  // namespace

std::string resolve_out_dir(const RunConfig& config) {
  if (config.has("out_dir")) return config.get("out_dir", "");
  if (const char* env = std::getenv("PACOPT_OUT_DIR")) return env;
  return "pacopt_out";
}

PosteriorConvergenceOutcome run_posterior_convergence(const RunConfig& rc) {
  require_regime(rc, "guaranteed", "posterior-convergence");
  const std::string alg_name = rc.get("algorithm", "gd");
  require(alg_name == "gd", "posterior-convergence studies gd");
  const std::uint64_t master = rc.get_uint("seed", 1);
  const std::string dir = resolve_out_dir(rc);

  const ProblemDistributionConfig pc = resolve_problem(rc, "fixed", master);
  require(pc.family == SpectrumFamily::FixedSpectrum,
          "posterior-convergence requires the fixed-spectrum family");
  const PartitionCounts counts = resolve_counts(rc, {100, 0, 200, 0});
  const Dataset ds = acquire_dataset(rc, pc, counts, master);
  require(!ds.train.empty() && !ds.prior_1.empty(), "needs train and prior_1 partitions");

  const double mu = ds.train.front().mu();
  const double ell = ds.train.front().ell();
  const double alpha_std = 2.0 / (ell + mu);
  const double cap = 2.0 / ell;  // stable region of gd; the prior lives inside it
  const double center = 0.5 * (1.0 / ell + 2.0 / ell);
  const double sigma = rc.get_double("posterior_convergence.sigma_scale", 0.25) / ell;
  const Vector x0 = Vector::Zero(pc.n);

  const std::size_t n_particles = rc.get_uint("particles", 500);
  const ParticleCloud base_cloud = sample_truncated_gaussian_cloud(
      center, sigma, cap, n_particles, derive_seed(master, "cloud"));

  const LambdaGrid grid = LambdaGrid::linear(rc.get_uint("grid_size", 25000));
  const PosteriorWeighting weighting = parse_weighting(rc.get("weighting", "prior-density"));
  const double epsilon = rc.get_double("epsilon", 0.01);
  const double second_moment = initial_loss_second_moment(ds.prior_1, x0);
  const std::vector<int> iteration_counts =
      rc.get_int_list("posterior_convergence.iteration_counts", {5, 15, 45, 135});

  PosteriorConvergenceOutcome outcome;
  outcome.step_cap = cap;
  CsvWriter summary(out_path(dir, "posterior_summary.csv"), rc.hash(), master,
                    {"n_iterations", "lambda_star", "bound", "argmax_step_size", "alpha_std",
                     "abs_distance_to_std", "max_positive_weight_step"});
  for (int n_it : iteration_counts) {
    const AlgorithmSpec alg = AlgorithmSpec::gd(n_it);
    StatisticsPlan plan;
    plan.regime = BoundRegime::Guaranteed;
    plan.n = static_cast<int>(ds.train.size());
    plan.epsilon = epsilon;
    plan.second_moment = second_moment;
    plan.convergence_constant = 1.0;
    EvaluationContext ctx;
    ctx.algorithm = alg;
    ctx.x0 = x0;
    ctx.spectrum_mu = mu;
    ctx.spectrum_ell = ell;

    ParticleCloud cloud = base_cloud;
    compute_statistics(plan, cloud, ds.train, ctx);
    const PacLearningResult rep = pac_bound_report(grid, plan, cloud, weighting);

    CsvWriter posterior(out_path(dir, "posterior_nit_" + std::to_string(n_it) + ".csv"),
                        rc.hash(), master, {"particle_index", "step_size", "posterior_weight"});
    double max_positive_step = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double step = cloud.particles[i].at("step_size");
      posterior.write_row({static_cast<double>(i), step, rep.posterior_weights[i]});
      if (rep.posterior_weights[i] > 0.0) max_positive_step = std::max(max_positive_step, step);
    }

    PosteriorConvergenceRow row;
    row.n_iterations = n_it;
    row.lambda_star = rep.lambda_star;
    row.bound = rep.bound;
    row.argmax_step_size = rep.argmax_particle.at("step_size");
    row.alpha_std = alpha_std;
    row.abs_distance_to_std = std::abs(row.argmax_step_size - alpha_std);
    row.max_positive_weight_step = max_positive_step;
    outcome.rows.push_back(row);
    summary.write_row({static_cast<double>(n_it), row.lambda_star, row.bound,
                       row.argmax_step_size, row.alpha_std, row.abs_distance_to_std,
                       row.max_positive_weight_step});
  }
  return outcome;
}

ConditioningOutcome run_conditioning(const RunConfig& rc) {
  require_regime(rc, "conditioned", "conditioning");
  const std::uint64_t master = rc.get_uint("seed", 1);
  const std::string dir = resolve_out_dir(rc);

  const ProblemDistributionConfig pc = resolve_problem(rc, "varying", master);
  const PartitionCounts counts = resolve_counts(rc, {50, 50, 100, 200});
  const Dataset ds = acquire_dataset(rc, pc, counts, master);
  require(!ds.test.empty(), "conditioning needs a test partition");

  const ConditionedLearnInputs in = resolve_conditioned_inputs(rc, pc);
  const Vector x0 = Vector::Zero(pc.n);
  const std::vector<double> targets = rc.get_list("targets", {0.9, 0.7, 0.5, 0.3});

  ConditioningOutcome outcome;
  CsvWriter summary(out_path(dir, "conditioning_summary.csv"), rc.hash(), master,
                    {"epsilon_conv", "lambda_star", "bound", "step_size", "momentum",
                     "p_hat_test", "n_converged_test"});
  for (double target : targets) {
    const std::string label = format_g(target);
    const ConditionedLearnOutput learned =
        learn_conditioned(in, target, ds, x0, derive_seed(master, "prior/" + label));
    const HyperparameterPoint& point = learned.report.argmax_particle;
    const TestTrace trace = trace_on_instances(in.algorithm, ds.test, x0, point);

    CsvWriter curve(out_path(dir, "conditioning_learned_eps" + label + ".csv"), rc.hash(),
                    master, {"iteration", "mean_loss", "median_loss"});
    for (std::size_t k = 0; k < trace.mean_losses.size(); ++k)
      curve.write_row(
          {static_cast<double>(k), trace.mean_losses[k], trace.median_losses[k]});

    ConditioningCurve c;
    c.epsilon_conv = target;
    c.mean_losses = trace.mean_losses;
    c.median_losses = trace.median_losses;
    c.p_hat_test = trace.p_hat;
    c.point = point;
    outcome.curves.push_back(std::move(c));
    const double momentum = point.contains("momentum") ? point.at("momentum") : 0.0;
    summary.write_row({target, learned.report.lambda_star, learned.report.bound,
                       point.at("step_size"), momentum, trace.p_hat,
                       static_cast<double>(trace.n_converged)});
  }

  const HyperparameterPoint standard =
      worst_case_hyperparameters(in.algorithm.name, pc.mu_fixed, pc.l_max);
  const TestTrace trace = trace_on_instances(in.algorithm, ds.test, x0, standard);
  CsvWriter curve(out_path(dir, "conditioning_standard.csv"), rc.hash(), master,
                  {"iteration", "mean_loss", "median_loss"});
  for (std::size_t k = 0; k < trace.mean_losses.size(); ++k)
    curve.write_row({static_cast<double>(k), trace.mean_losses[k], trace.median_losses[k]});
  ConditioningCurve reference;
  reference.epsilon_conv = 0.0;
  reference.mean_losses = trace.mean_losses;
  reference.median_losses = trace.median_losses;
  reference.p_hat_test = trace.p_hat;
  reference.point = standard;
  outcome.curves.push_back(std::move(reference));
  return outcome;
}

ConvergenceProbabilityOutcome run_convergence_probability(const RunConfig& rc) {
  require_regime(rc, "conditioned", "conv-prob");
  const std::uint64_t master = rc.get_uint("seed", 1);
  const std::string dir = resolve_out_dir(rc);

  const ProblemDistributionConfig pc = resolve_problem(rc, "varying", master);
  const PartitionCounts counts = resolve_counts(rc, {50, 50, 100, 0});
  const Dataset ds = acquire_dataset(rc, pc, counts, master);

  const ConditionedLearnInputs in = resolve_conditioned_inputs(rc, pc);
  const Vector x0 = Vector::Zero(pc.n);
  const std::vector<double> targets = rc.get_list("targets", {0.9, 0.7, 0.5, 0.3});
  const std::size_t n_sets = rc.get_uint("conv_prob.test_sets", 25);
  const std::size_t set_size = rc.get_uint("conv_prob.test_set_size", 250);
  require(n_sets >= 1 && set_size >= 1, "needs at least one non-empty test set");

  // One shared pool of test sets, created up front and reused for every target.
  std::vector<std::vector<ProblemInstance>> test_sets;
  test_sets.reserve(n_sets);
  for (std::size_t s = 0; s < n_sets; ++s)
    test_sets.push_back(
        sample_instances(pc, set_size, derive_seed(master, "conv_prob_test/" + std::to_string(s))));

  ConvergenceProbabilityOutcome outcome;
  CsvWriter rows(out_path(dir, "conv_prob.csv"), rc.hash(), master,
                 {"target", "test_set_index", "p_hat"});
  CsvWriter summary(out_path(dir, "conv_prob_summary.csv"), rc.hash(), master,
                    {"target", "lambda_star", "bound", "step_size", "momentum"});
  for (double target : targets) {
    const std::string label = format_g(target);
    const ConditionedLearnOutput learned =
        learn_conditioned(in, target, ds, x0, derive_seed(master, "prior/" + label));
    const HyperparameterPoint& point = learned.report.argmax_particle;
    for (std::size_t s = 0; s < n_sets; ++s) {
      const double p_hat = estimate_p(point, test_sets[s], in.algorithm, x0);
      rows.write_row({target, static_cast<double>(s), p_hat});
      outcome.rows.push_back({target, static_cast<int>(s), p_hat});
    }
    const double momentum = point.contains("momentum") ? point.at("momentum") : 0.0;
    summary.write_row({target, learned.report.lambda_star, learned.report.bound,
                       point.at("step_size"), momentum});
  }
  return outcome;
}

PacBoundOutcome run_pac_bound(const RunConfig& rc) {
  require_regime(rc, "conditioned", "pac-bound");
  const std::uint64_t master = rc.get_uint("seed", 1);
  const std::string dir = resolve_out_dir(rc);

  const ProblemDistributionConfig pc = resolve_problem(rc, "varying", master);
  const PartitionCounts counts = resolve_counts(rc, {100, 100, 1000, 200});
  const Dataset ds = acquire_dataset(rc, pc, counts, master);
  require(!ds.test.empty(), "pac-bound needs a test partition");

  const ConditionedLearnInputs in = resolve_conditioned_inputs(rc, pc);
  const Vector x0 = Vector::Zero(pc.n);
  const double target = rc.get_double("prior.epsilon_conv", 0.9);

  const ConditionedLearnOutput learned =
      learn_conditioned(in, target, ds, x0, derive_seed(master, "prior/" + format_g(target)));
  const HyperparameterPoint& point = learned.report.argmax_particle;
  const HyperparameterPoint standard =
      worst_case_hyperparameters(in.algorithm.name, pc.mu_fixed, pc.l_max);

  const RiskRecord learned_record = evaluate_record(point, ds.test, in.algorithm, x0);
  const RiskRecord standard_record = evaluate_record(standard, ds.test, in.algorithm, x0);

  PacBoundOutcome outcome;
  outcome.bound = learned.report.bound;
  outcome.lambda_star = learned.report.lambda_star;
  outcome.learned_point = point;
  outcome.standard_point = standard;
  outcome.learned_p_hat_test = estimate_p(learned_record);
  outcome.learned_test_mean_all = empirical_risk(learned_record);
  // Mean over converged test instances: the quantity the conditioned bound controls.
  outcome.learned_test_mean_converged =
      outcome.learned_p_hat_test > 0.0
          ? empirical_convergence_risk(learned_record, outcome.learned_p_hat_test)
          : kNaN;
  outcome.standard_test_mean = empirical_risk(standard_record);

  CsvWriter hist(out_path(dir, "pac_bound_hist.csv"), rc.hash(), master,
                 {"instance_index", "learned_final_loss", "standard_final_loss"});
  for (std::size_t i = 0; i < learned_record.final_losses.size(); ++i)
    hist.write_row({static_cast<double>(i), learned_record.final_losses[i],
                    standard_record.final_losses[i]});

  const double momentum = point.contains("momentum") ? point.at("momentum") : 0.0;
  CsvWriter summary(out_path(dir, "pac_bound_summary.csv"), rc.hash(), master,
                    {"bound", "lambda_star", "kappa_at_star", "log_term", "step_size", "momentum",
                     "learned_test_mean_converged", "learned_test_mean_all", "learned_p_hat_test",
                     "standard_test_mean"});
  summary.write_row({outcome.bound, outcome.lambda_star, learned.report.kappa_at_star,
                     learned.report.log_term, point.at("step_size"), momentum,
                     outcome.learned_test_mean_converged, outcome.learned_test_mean_all,
                     outcome.learned_p_hat_test, outcome.standard_test_mean});
  return outcome;
}

LearnOutcome run_learn(const RunConfig& rc) {
  const std::uint64_t master = rc.get_uint("seed", 1);
  const std::string dir = resolve_out_dir(rc);
  const BoundRegime regime = parse_regime(rc.get("regime", "conditioned"));

  LearnOutcome outcome;
  outcome.regime = regime;
  if (regime == BoundRegime::Conditioned) {
    const ProblemDistributionConfig pc = resolve_problem(rc, "varying", master);
    const PartitionCounts counts = resolve_counts(rc, {50, 50, 100, 0});
    const Dataset ds = acquire_dataset(rc, pc, counts, master);
    const ConditionedLearnInputs in = resolve_conditioned_inputs(rc, pc);
    const Vector x0 = Vector::Zero(pc.n);
    const double target = rc.get_double("prior.epsilon_conv", 0.9);
    ConditionedLearnOutput learned =
        learn_conditioned(in, target, ds, x0, derive_seed(master, "prior/" + format_g(target)));
    outcome.result = std::move(learned.report);
    outcome.n_particles = learned.cloud.size();
    outcome.posterior_mean = posterior_mean_point(learned.cloud, outcome.result.posterior_weights);
    write_posterior_csv(out_path(dir, "posterior.csv"), rc.hash(), master, learned.cloud,
                        outcome.result.posterior_weights);
    write_bound_report_csv(out_path(dir, "bound_report.csv"), rc.hash(), master, "conditioned",
                           outcome.result, outcome.n_particles);
    return outcome;
  }

  // Guaranteed: gd on the fixed-spectrum family with a Gaussian step-size
  // prior truncated to the stable region.
  const ProblemDistributionConfig pc = resolve_problem(rc, "fixed", master);
  require(pc.family == SpectrumFamily::FixedSpectrum,
          "guaranteed learning requires the fixed-spectrum family");
  require(rc.get("algorithm", "gd") == "gd", "guaranteed learning covers gd");
  const PartitionCounts counts = resolve_counts(rc, {100, 0, 200, 0});
  const Dataset ds = acquire_dataset(rc, pc, counts, master);
  require(!ds.train.empty() && !ds.prior_1.empty(), "needs train and prior_1 partitions");

  const double ell = ds.train.front().ell();
  const double cap = 2.0 / ell;
  const double center = 0.5 * (1.0 / ell + 2.0 / ell);
  const double sigma = rc.get_double("posterior_convergence.sigma_scale", 0.25) / ell;
  const Vector x0 = Vector::Zero(pc.n);
  ParticleCloud cloud = sample_truncated_gaussian_cloud(
      center, sigma, cap, rc.get_uint("particles", 500), derive_seed(master, "cloud"));

  const AlgorithmSpec alg = AlgorithmSpec::gd(static_cast<int>(rc.get_int("iterations", 50)));
  StatisticsPlan plan;
  plan.regime = BoundRegime::Guaranteed;
  plan.n = static_cast<int>(ds.train.size());
  plan.epsilon = rc.get_double("epsilon", 0.01);
  plan.second_moment = initial_loss_second_moment(ds.prior_1, x0);
  EvaluationContext ctx;
  ctx.algorithm = alg;
  ctx.x0 = x0;
  ctx.spectrum_mu = ds.train.front().mu();
  ctx.spectrum_ell = ell;
  compute_statistics(plan, cloud, ds.train, ctx);

  const LambdaGrid grid = LambdaGrid::linear(rc.get_uint("grid_size", 25000));
  outcome.result =
      pac_bound_report(grid, plan, cloud, parse_weighting(rc.get("weighting", "prior-density")));
  outcome.n_particles = cloud.size();
  outcome.posterior_mean = posterior_mean_point(cloud, outcome.result.posterior_weights);
  write_posterior_csv(out_path(dir, "posterior.csv"), rc.hash(), master, cloud,
                      outcome.result.posterior_weights);
  write_bound_report_csv(out_path(dir, "bound_report.csv"), rc.hash(), master, "guaranteed",
                         outcome.result, outcome.n_particles);
  return outcome;
}

void run_generate(const RunConfig& rc, const std::string& path) {
  const std::uint64_t master = rc.get_uint("seed", 1);
  const ProblemDistributionConfig pc =
      resolve_problem(rc, rc.get("problem.family", "varying"), master);
  const PartitionCounts counts = resolve_counts(rc, {50, 50, 100, 200});
  const Dataset ds = generate_dataset(pc, counts, derive_seed(master, "data"));
  write_dataset_file(path, ds);
}

}  // namespace pacopt
