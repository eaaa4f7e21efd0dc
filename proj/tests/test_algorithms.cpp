// Heavy-ball / gradient-descent unrolling, worst-case tuning, and the GD
// contraction factor.

#include "doctest.h"
#include "helpers.hpp"

#include "pacopt/algorithms.hpp"
#include "pacopt/common.hpp"
#include "pacopt/problems.hpp"

#include <cmath>
#include <random>

using namespace pacopt;
using namespace pacopt_test;

namespace {

ProblemDistributionConfig family_config(SpectrumFamily family, Index n, std::uint64_t seed) {
  ProblemDistributionConfig pc;
  pc.n = n;
  pc.family = family;
  pc.seed = seed;
  auto [mean, cov] = make_rhs_moments(n, derive_seed(seed, "rhs_moments"));
  pc.rhs_mean = mean;
  pc.rhs_cov = cov;
  return pc;
}

}  // namespace

TEST_CASE("hb_step: momentum 0 reduces to a gradient step, zero steps stay put") {
  std::mt19937_64 engine(12);
  std::normal_distribution<double> draw;
  Vector x(4), xm1(4), g(4);
  for (Index i = 0; i < 4; ++i) {
    x[i] = draw(engine);
    xm1[i] = draw(engine);
    g[i] = draw(engine);
  }

  const Vector plain = x - 0.3 * g;
  CHECK(hb_step(x, xm1, {{"step_size", 0.3}, {"momentum", 0.0}}, g) == plain);

  // step 0, momentum 0: x_k unchanged.
  CHECK(hb_step(x, xm1, {{"step_size", 0.0}, {"momentum", 0.0}}, g) == x);

  // At a fixed point (grad 0, x_km1 = x_k) any parameters stay put.
  CHECK(hb_step(x, x, {{"step_size", 0.7}, {"momentum", 0.9}}, Vector::Zero(4)) == x);

  CHECK_THROWS_AS(hb_step(x, xm1, {{"step_size", 0.3}}, g), std::invalid_argument);
}

TEST_CASE("unroll with the identity matrix and step 1 lands on the minimizer") {
  const auto inst = ProblemInstance::dense(Matrix::Identity(3, 3), vec({0.0, 0.0, 0.0}));
  const auto traj = unroll(AlgorithmSpec::gd(4), inst, vec({2.0, -1.0, 5.0}), {{"step_size", 1.0}});
  REQUIRE(traj.losses.size() == 5);
  CHECK(traj.losses[0] == 15.0);  // 0.5 * (4 + 1 + 25)
  for (std::size_t k = 1; k < traj.losses.size(); ++k) CHECK(traj.losses[k] == 0.0);
}

TEST_CASE("heavy-ball with momentum 0 reproduces gradient descent bitwise") {
  const auto fixed = family_config(SpectrumFamily::FixedSpectrum, 6, 81);
  const auto varying = family_config(SpectrumFamily::VaryingSpectrum, 6, 82);
  std::mt19937_64 engine(5150);
  std::uniform_real_distribution<double> unit(0.05, 0.95);

  for (const auto& pc : {fixed, varying}) {
    const auto instances = sample_instances(pc, 5, 61);
    for (const auto& inst : instances) {
      const double step = unit(engine) * 2.0 / inst.ell();
      const Vector x0 = Vector::Ones(inst.dim());
      const auto gd = unroll(AlgorithmSpec::gd(50), inst, x0, {{"step_size", step}});
      const auto hb = unroll(AlgorithmSpec::heavy_ball(50), inst, x0,
                             {{"step_size", step}, {"momentum", 0.0}});
      REQUIRE(gd.iterates.size() == hb.iterates.size());
      for (std::size_t k = 0; k < gd.iterates.size(); ++k) {
        CHECK(gd.iterates[k] == hb.iterates[k]);
        CHECK(gd.losses[k] == hb.losses[k]);
      }
    }
  }
}

TEST_CASE("GD loss contracts by exactly 0.36 per step on the (1,4) spectrum") {
  // diag(1, 2) has A^T A eigenvalues {1, 4}; step 0.4 gives per-coordinate
  // factors 0.6 and -0.6, so losses shrink by 0.36 each iteration.
  const auto inst = ProblemInstance::diagonal(vec({1.0, 2.0}), vec({0.0, 0.0}), 1.0, 4.0);
  const auto traj = unroll(AlgorithmSpec::gd(25), inst, vec({1.0, 1.0}), {{"step_size", 0.4}});
  const double loss0 = traj.losses[0];
  CHECK(loss0 == 2.5);  // 0.5 * (1 + 4)
  double factor = 1.0;
  for (std::size_t k = 1; k < traj.losses.size(); ++k) {
    factor *= 0.36;
    CHECK(traj.losses[k] == doctest::Approx(loss0 * factor).epsilon(1e-10));
  }
}

TEST_CASE("final_loss matches the trajectory's last loss bitwise") {
  const auto pc = family_config(SpectrumFamily::VaryingSpectrum, 5, 83);
  const auto instances = sample_instances(pc, 10, 62);
  for (const auto& inst : instances) {
    const HyperparameterPoint alpha{{"step_size", 1.0 / inst.ell()}};
    const Vector x0 = Vector::Ones(5);
    const auto traj = unroll(AlgorithmSpec::gd(20), inst, x0, alpha);
    CHECK(final_loss(AlgorithmSpec::gd(20), inst, x0, alpha) == traj.losses.back());
  }
}

TEST_CASE("divergent trajectories overflow to non-finite losses without throwing") {
  const auto inst = ProblemInstance::diagonal(vec({100.0}), vec({1.0}), 1e4, 1e4);
  const HyperparameterPoint alpha{{"step_size", 2.0}};  // |1 - 2e4| >> 1
  Trajectory traj;
  CHECK_NOTHROW(traj = unroll(AlgorithmSpec::gd(50), inst, vec({0.0}), alpha));
  CHECK(!std::isfinite(traj.losses.back()));
  CHECK(traj.losses.front() == 0.5);
}

TEST_CASE("worst-case hyperparameters match the classical formulas") {
  // GD with mu = L: 2 / (2L) = 1 / L.
  CHECK(worst_case_hyperparameters("gd", 3.0, 3.0).at("step_size") == 1.0 / 3.0);
  CHECK(worst_case_hyperparameters("gd", 1.0, 4.0).at("step_size") == 0.4);

  // Heavy ball on [1, 100]: step (2/11)^2, momentum (9/11)^2.
  const auto hb = worst_case_hyperparameters("heavy_ball", 1.0, 100.0);
  CHECK(hb.at("step_size") == doctest::Approx(4.0 / 121.0).epsilon(1e-15));
  CHECK(hb.at("momentum") == doctest::Approx(81.0 / 121.0).epsilon(1e-15));

  // mu = L: momentum collapses to zero, step to 1 / L.
  const auto flat = worst_case_hyperparameters("heavy_ball", 9.0, 9.0);
  CHECK(flat.at("momentum") == 0.0);
  CHECK(flat.at("step_size") == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  CHECK_THROWS_AS(worst_case_hyperparameters("newton", 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(worst_case_hyperparameters("gd", 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(worst_case_hyperparameters("gd", 3.0, 2.0), std::invalid_argument);
}

TEST_CASE("gd_contraction_rho on hand-checked step sizes") {
  CHECK(gd_contraction_rho({{"step_size", 0.0}}, 1.0, 4.0, 7) == 1.0);
  CHECK(gd_contraction_rho({{"step_size", 0.5}}, 1.0, 4.0, 13) == 1.0);  // tau = 2 / L
  CHECK(gd_contraction_rho({{"step_size", 0.4}}, 1.0, 4.0, 1) ==
        doctest::Approx(0.36).epsilon(1e-14));
  // Outside the stable region the factor exceeds one.
  CHECK(gd_contraction_rho({{"step_size", 1.0}}, 1.0, 4.0, 1) > 1.0);
  CHECK_THROWS_AS(gd_contraction_rho({{"step_size", 0.1}}, 0.0, 4.0, 1), std::invalid_argument);
}

TEST_CASE("GD losses stay below the contraction envelope on diagonal instances") {
  const auto pc = family_config(SpectrumFamily::VaryingSpectrum, 8, 84);
  const auto instances = sample_instances(pc, 20, 63);
  for (const auto& inst : instances) {
    for (int j = 1; j <= 10; ++j) {
      const double step = static_cast<double>(j) / 11.0 * 2.0 / inst.ell();
      const auto traj = unroll(AlgorithmSpec::gd(50), inst, Vector::Ones(8),
                               {{"step_size", step}});
      for (int k = 0; k <= 50; ++k) {
        const double rho = gd_contraction_rho({{"step_size", step}}, inst.mu(), inst.ell(), k);
        CHECK(traj.losses[static_cast<std::size_t>(k)] <=
              rho * traj.losses[0] * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("unroll is a pure function of its arguments") {
  const auto pc = family_config(SpectrumFamily::FixedSpectrum, 5, 85);
  const auto inst = sample_instances(pc, 1, 64).front();
  const HyperparameterPoint alpha{{"step_size", 0.3 / inst.ell()}};
  const auto a = unroll(AlgorithmSpec::gd(10), inst, Vector::Ones(5), alpha);
  const auto b = unroll(AlgorithmSpec::gd(10), inst, Vector::Ones(5), alpha);
  for (std::size_t k = 0; k < a.iterates.size(); ++k) CHECK(a.iterates[k] == b.iterates[k]);
}

TEST_CASE("algorithm and hyperparameter validation") {
  AlgorithmSpec bad = AlgorithmSpec::gd(5);
  bad.name = "newton";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  CHECK_THROWS_AS(AlgorithmSpec::gd(0).validate(), std::invalid_argument);

  AlgorithmSpec wrong_names = AlgorithmSpec::gd(5);
  wrong_names.hyperparameter_names = {"stepsize"};
  CHECK_THROWS_AS(wrong_names.validate(), std::invalid_argument);

  // Negative step sizes and momenta are rejected at the point level.
  CHECK_THROWS_AS((HyperparameterPoint{{"step_size", -0.1}}), std::invalid_argument);
  CHECK_THROWS_AS((HyperparameterPoint{{"step_size", 0.1}, {"momentum", -1.0}}),
                  std::invalid_argument);

  // The point's name set must match the algorithm's declared set exactly.
  const auto inst = scalar_instance(1.0, 1.0);
  CHECK_THROWS_AS(unroll(AlgorithmSpec::gd(3), inst, vec({0.0}),
                         {{"step_size", 0.1}, {"momentum", 0.2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(unroll(AlgorithmSpec::heavy_ball(3), inst, vec({0.0}), {{"step_size", 0.1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(unroll(AlgorithmSpec::gd(3), inst, vec({0.0, 0.0}), {{"step_size", 0.1}}),
                  std::invalid_argument);
}
