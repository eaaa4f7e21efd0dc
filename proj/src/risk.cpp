#include "pacopt/risk.hpp"

#include <cmath>

namespace pacopt {

RiskRecord evaluate_record(const HyperparameterPoint& alpha,
                           const std::vector<ProblemInstance>& instances,
                           const AlgorithmSpec& spec, const Vector& x0) {
  RiskRecord record;
  record.initial_losses.reserve(instances.size());
  record.final_losses.reserve(instances.size());
  record.converged.reserve(instances.size());
  for (const auto& instance : instances) {
    const double initial = instance.loss(x0);
    const double final = final_loss(spec, instance, x0, alpha);
    record.initial_losses.push_back(initial);
    record.final_losses.push_back(final);
    record.converged.push_back(std::isfinite(final) && final <= initial);
  }
  return record;
}

double empirical_risk(const RiskRecord& record) {
  require(!record.final_losses.empty(), "empirical risk of an empty instance list");
  double sum = 0.0;
  for (double loss : record.final_losses) sum += loss;
  return sum / static_cast<double>(record.final_losses.size());
}

double estimate_p(const RiskRecord& record) {
  require(!record.converged.empty(), "convergence estimate of an empty instance list");
  std::size_t count = 0;
  for (bool c : record.converged) count += c ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(record.converged.size());
}

double empirical_convergence_risk(const RiskRecord& record, double p_hat) {
  require(!record.final_losses.empty(), "convergence risk of an empty instance list");
  if (p_hat <= 0.0)
    throw std::domain_error("convergence risk undefined: estimated convergence probability is 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < record.final_losses.size(); ++i)
    if (record.converged[i]) sum += record.final_losses[i];
  return sum / (p_hat * static_cast<double>(record.final_losses.size()));
}

double empirical_risk(const HyperparameterPoint& alpha,
                      const std::vector<ProblemInstance>& instances, const AlgorithmSpec& spec,
                      const Vector& x0) {
  return empirical_risk(evaluate_record(alpha, instances, spec, x0));
}

bool converged(const HyperparameterPoint& alpha, const ProblemInstance& instance,
               const AlgorithmSpec& spec, const Vector& x0) {
  const double initial = instance.loss(x0);
  const double final = final_loss(spec, instance, x0, alpha);
  return std::isfinite(final) && final <= initial;
}

double estimate_p(const HyperparameterPoint& alpha, const std::vector<ProblemInstance>& instances,
                  const AlgorithmSpec& spec, const Vector& x0) {
  return estimate_p(evaluate_record(alpha, instances, spec, x0));
}

double empirical_convergence_risk(const HyperparameterPoint& alpha,
                                  const std::vector<ProblemInstance>& instances,
                                  const AlgorithmSpec& spec, const Vector& x0, double p_hat) {
  return empirical_convergence_risk(evaluate_record(alpha, instances, spec, x0), p_hat);
}

double initial_loss_second_moment(const std::vector<ProblemInstance>& instances,
                                  const Vector& x0) {
  require(!instances.empty(), "second moment of an empty instance list");
  double sum = 0.0;
  for (const auto& instance : instances) {
    const double loss = instance.loss(x0);
    sum += loss * loss;
  }
  return sum / static_cast<double>(instances.size());
}

}  // namespace pacopt
