#pragma once

#include "pacopt/config.hpp"
#include "pacopt/pacbayes.hpp"

#include <string>
#include <vector>

namespace pacopt {

struct VerifyLine {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct SubGaussianCheckResult {
  double mean = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/**
 * Monte-Carlo check of the lower-tail moment bound for a non-negative loss X:
 * the estimate of E[exp(-lambda * (X - E[X]))] must not exceed
 * exp(lambda^2 / 2 * E[X^2]) beyond three standard errors.
 */
SubGaussianCheckResult check_subgaussian_moment(const ProblemDistributionConfig& problem,
                                                const AlgorithmSpec& algorithm, const Vector& x0,
                                                const HyperparameterPoint& alpha, double lambda,
                                                int n_samples, std::uint64_t seed);

/** Runs the Monte-Carlo oracles at the configured scale; one line per check. */
std::vector<VerifyLine> run_verification(const RunConfig& config);

}  // namespace pacopt
