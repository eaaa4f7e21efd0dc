#pragma once

#include "pacopt/algorithms.hpp"
#include "pacopt/common.hpp"
#include "pacopt/problems.hpp"

#include <vector>

namespace pacopt {

/** Per-instance evaluation of one hyperparameter point on an instance list. */
struct RiskRecord {
  std::vector<double> initial_losses;
  std::vector<double> final_losses;
  std::vector<bool> converged;  // final loss finite and <= initial loss
};

RiskRecord evaluate_record(const HyperparameterPoint& alpha,
                           const std::vector<ProblemInstance>& instances,
                           const AlgorithmSpec& spec, const Vector& x0);

/** Mean final loss; non-finite values propagate. Errors on an empty list. */
double empirical_risk(const HyperparameterPoint& alpha,
                      const std::vector<ProblemInstance>& instances, const AlgorithmSpec& spec,
                      const Vector& x0);

/** Final loss finite and <= initial loss (inclusive). */
bool converged(const HyperparameterPoint& alpha, const ProblemInstance& instance,
               const AlgorithmSpec& spec, const Vector& x0);

/** Fraction of instances on which the point converged (binomial estimator). */
double estimate_p(const HyperparameterPoint& alpha, const std::vector<ProblemInstance>& instances,
                  const AlgorithmSpec& spec, const Vector& x0);

/**
 * (1 / p_hat) * (1 / N) * sum of final losses over converged instances;
 * divergent instances contribute zero. Errors when p_hat = 0.
 */
double empirical_convergence_risk(const HyperparameterPoint& alpha,
                                  const std::vector<ProblemInstance>& instances,
                                  const AlgorithmSpec& spec, const Vector& x0, double p_hat);

/** Mean of loss(x0)^2 over the instances (plug-in second moment). */
double initial_loss_second_moment(const std::vector<ProblemInstance>& instances, const Vector& x0);

// Record-based variants (same definitions, reusing precomputed trajectories).
double empirical_risk(const RiskRecord& record);
double estimate_p(const RiskRecord& record);
double empirical_convergence_risk(const RiskRecord& record, double p_hat);

}  // namespace pacopt
