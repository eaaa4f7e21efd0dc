// Empirical risks, convergence indicators, and the conditioned risk estimator.

#include "doctest.h"
#include "helpers.hpp"

#include "pacopt/algorithms.hpp"
#include "pacopt/common.hpp"
#include "pacopt/problems.hpp"
#include "pacopt/risk.hpp"
#include "pacopt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace pacopt;
using namespace pacopt_test;

namespace {

// Step size 0 freezes the iterate, so the final loss equals the initial loss:
// instances with loss(0) = 1 and 3 give an empirical risk of exactly 2.
const HyperparameterPoint kFrozen{{"step_size", 0.0}};

std::vector<ProblemInstance> frozen_pair() {
  return {scalar_instance(1.0, std::sqrt(2.0)),   // loss at 0: 0.5 * 2 = 1
          scalar_instance(1.0, std::sqrt(6.0))};  // loss at 0: 0.5 * 6 = 3
}

}  // namespace

TEST_CASE("empirical risk averages final losses") {
  const auto instances = frozen_pair();
  const Vector x0 = vec({0.0});
  const double risk = empirical_risk(kFrozen, instances, AlgorithmSpec::gd(5), x0);
  CHECK(risk == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(empirical_risk(kFrozen, {}, AlgorithmSpec::gd(5), x0), std::invalid_argument);
}

TEST_CASE("a divergent instance contaminates the empirical risk to non-finite") {
  // tau = 2 on eigenvalue 1e4 overflows within 50 iterations.
  std::vector<ProblemInstance> instances = {scalar_instance(1.0, std::sqrt(2.0)),
                                            scalar_instance(100.0, 1.0)};
  const HyperparameterPoint tau2{{"step_size", 2.0}};
  const Vector x0 = vec({0.0});
  const double risk = empirical_risk(tau2, instances, AlgorithmSpec::gd(50), x0);
  CHECK(!std::isfinite(risk));

  const RiskRecord record = evaluate_record(tau2, instances, AlgorithmSpec::gd(50), x0);
  CHECK(record.converged[0]);        // oscillates: final equals initial, inclusive
  CHECK_FALSE(record.converged[1]);  // overflowed
  CHECK(estimate_p(record) == 0.5);
}

TEST_CASE("converged is an inclusive comparison against the initial loss") {
  const auto inst = scalar_instance(2.0, 1.0);  // eigenvalue 4
  const Vector x0 = vec({0.0});
  // Frozen iterate: final == initial, counts as converged.
  CHECK(converged(kFrozen, inst, AlgorithmSpec::gd(50), x0));
  // Stable step converges outright.
  CHECK(converged({{"step_size", 2.0 / (4.0 + 4.0)}}, inst, AlgorithmSpec::gd(50), x0));
  // tau = 10 / L leaves the stable region: loss grows.
  CHECK_FALSE(converged({{"step_size", 10.0 / 4.0}}, inst, AlgorithmSpec::gd(50), x0));
}

TEST_CASE("estimate_p counts converged instances") {
  RiskRecord record;
  for (int i = 0; i < 200; ++i) {
    record.initial_losses.push_back(1.0);
    record.final_losses.push_back(i < 180 ? 0.5 : 2.0);
    record.converged.push_back(i < 180);
  }
  CHECK(estimate_p(record) == 0.9);

  RiskRecord all = record;
  std::fill(all.converged.begin(), all.converged.end(), true);
  CHECK(estimate_p(all) == 1.0);

  RiskRecord none = record;
  std::fill(none.converged.begin(), none.converged.end(), false);
  CHECK(estimate_p(none) == 0.0);

  // Permutation invariance: the estimator is a count.
  RiskRecord shuffled = record;
  std::mt19937_64 engine(3);
  std::shuffle(shuffled.converged.begin(), shuffled.converged.end(), engine);
  CHECK(estimate_p(shuffled) == 0.9);
}

TEST_CASE("empirical convergence risk on the two-instance example") {
  // N = 2, losses {1, divergent}, p_hat = 0.5: (1 / 0.5) * (1 / 2) * 1 = 1.
  RiskRecord record;
  record.initial_losses = {1.0, 1.0};
  record.final_losses = {1.0, std::numeric_limits<double>::infinity()};
  record.converged = {true, false};
  CHECK(empirical_convergence_risk(record, 0.5) == 1.0);

  // All converged: reduces to the plain empirical risk.
  RiskRecord fine;
  fine.initial_losses = {4.0, 4.0, 4.0};
  fine.final_losses = {1.0, 2.0, 3.0};
  fine.converged = {true, true, true};
  CHECK(empirical_convergence_risk(fine, 1.0) == empirical_risk(fine));

  // No converged instances contribute zero mass.
  RiskRecord bad;
  bad.initial_losses = {1.0};
  bad.final_losses = {2.0};
  bad.converged = {false};
  CHECK(empirical_convergence_risk(bad, 0.5) == 0.0);

  CHECK_THROWS_AS(empirical_convergence_risk(record, 0.0), std::domain_error);
}

TEST_CASE("initial loss second moment") {
  // Losses at zero are 1 and 2, so the second moment is (1 + 4) / 2 = 2.5.
  std::vector<ProblemInstance> instances = {scalar_instance(1.0, std::sqrt(2.0)),
                                            scalar_instance(1.0, 2.0)};
  const double m = initial_loss_second_moment(instances, vec({0.0}));
  CHECK(m == doctest::Approx(2.5).epsilon(1e-15));

  // Brute-force oracle on random instances.
  ProblemDistributionConfig pc;
  pc.n = 4;
  pc.family = SpectrumFamily::VaryingSpectrum;
  pc.seed = 71;
  auto [mean, cov] = make_rhs_moments(4, derive_seed(pc.seed, "rhs_moments"));
  pc.rhs_mean = mean;
  pc.rhs_cov = cov;
  const auto sample = sample_instances(pc, 100, 72);
  const Vector x0 = Vector::Ones(4);
  double expected = 0.0;
  for (const auto& inst : sample) {
    const double loss = inst.loss(x0);
    expected += loss * loss;
  }
  expected /= 100.0;
  CHECK(initial_loss_second_moment(sample, x0) == expected);

  CHECK_THROWS_AS(initial_loss_second_moment({}, x0), std::invalid_argument);
}

TEST_CASE("record-based and instance-based estimators agree") {
  const auto instances = frozen_pair();
  const Vector x0 = vec({0.0});
  const AlgorithmSpec gd = AlgorithmSpec::gd(7);
  const HyperparameterPoint alpha{{"step_size", 0.5}};
  const RiskRecord record = evaluate_record(alpha, instances, gd, x0);
  CHECK(empirical_risk(record) == empirical_risk(alpha, instances, gd, x0));
  CHECK(estimate_p(record) == estimate_p(alpha, instances, gd, x0));
  if (estimate_p(record) > 0.0)
    CHECK(empirical_convergence_risk(record, estimate_p(record)) ==
          empirical_convergence_risk(alpha, instances, gd, x0, estimate_p(record)));
}

TEST_CASE("lower-tail exponential moments respect the sub-Gaussian envelope") {
  // Small-scale losses keep exp(lambda^2 / 2 * E[X^2]) finite even at
  // lambda = 5, making the comparison falsifiable at every tested lambda.
  ProblemDistributionConfig pc;
  pc.n = 2;
  pc.family = SpectrumFamily::VaryingSpectrum;
  pc.mu_fixed = 1.0;
  pc.l_min = 1.0;
  pc.l_max = 4.0;
  pc.rhs_mean = vec({0.1, -0.1});
  pc.rhs_cov = 0.01 * Matrix::Identity(2, 2);

  const HyperparameterPoint alpha{{"step_size", 0.25}};
  for (double lambda : {0.1, 1.0, 5.0}) {
    const auto result = check_subgaussian_moment(pc, AlgorithmSpec::gd(10), Vector::Zero(2),
                                                 alpha, lambda, 4000, 2025);
    CHECK(std::isfinite(result.bound));
    CHECK(result.ok);
    CHECK(result.mean <= result.bound + 3.0 * result.std_error + 1e-12);
  }
}
