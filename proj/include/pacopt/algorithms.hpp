#pragma once

#include "pacopt/common.hpp"
#include "pacopt/problems.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pacopt {

/**
 * Named hyperparameter values. "step_size" must be >= 0 and "momentum" >= 0
 * where present; other names are unconstrained.
 */
class HyperparameterPoint {
 public:
  HyperparameterPoint() = default;
  HyperparameterPoint(std::initializer_list<std::pair<const std::string, double>> values);

  void set(const std::string& name, double value);
  double at(std::string_view name) const;  // throws if the name is absent
  bool contains(std::string_view name) const;
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

/** Algorithm identity: name, declared hyperparameter names, iteration count. */
struct AlgorithmSpec {
  std::string name;  // "gd" | "heavy_ball"
  std::vector<std::string> hyperparameter_names;
  int n_iterations = 1;

  static AlgorithmSpec gd(int n_iterations);
  static AlgorithmSpec heavy_ball(int n_iterations);

  void validate() const;
};

/**
 * Iterates x^(0) .. x^(n_iterations) and the loss at each iterate.
 * Divergence shows up as non-finite losses, never as an error.
 */
struct Trajectory {
  std::vector<Vector> iterates;
  std::vector<double> losses;
};

/** One heavy-ball update: x_k - step_size * grad + momentum * (x_k - x_km1). */
Vector hb_step(const Vector& x_k, const Vector& x_km1, const HyperparameterPoint& alpha,
               const Vector& grad);

/**
 * Runs the algorithm from x0. Heavy-ball initializes x^(-1) = x^(0), so
 * momentum 0 reproduces gradient descent exactly (identical arithmetic path).
 * The hyperparameter name set must match the spec's declared names exactly.
 */
Trajectory unroll(const AlgorithmSpec& spec, const ProblemInstance& instance, const Vector& x0,
                  const HyperparameterPoint& alpha);

/** Loss at the final iterate only (no trajectory storage; same arithmetic). */
double final_loss(const AlgorithmSpec& spec, const ProblemInstance& instance, const Vector& x0,
                  const HyperparameterPoint& alpha);

/**
 * Worst-case tuned hyperparameters on [mu_minus, l_plus]:
 *   gd:         step_size = 2 / (l_plus + mu_minus)
 *   heavy_ball: step_size = (2 / (sqrt(l_plus) + sqrt(mu_minus)))^2,
 *               momentum  = ((sqrt(l_plus) - sqrt(mu_minus)) / (sqrt(l_plus) + sqrt(mu_minus)))^2
 */
HyperparameterPoint worst_case_hyperparameters(std::string_view algorithm, double mu_minus,
                                               double l_plus);

/**
 * Contraction factor of k GD steps on losses of a quadratic with extreme
 * curvatures (mu, ell): max(|1 - t*mu|, |1 - t*ell|)^(2k) for step size t.
 * Valid for any positive step size; exceeds 1 outside the stable region.
 */
double gd_contraction_rho(const HyperparameterPoint& alpha, double mu, double ell, int k);

}  // namespace pacopt
