#include "pacopt/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pacopt {

namespace {

void validate_known_names(const std::string& name, double value) {
  if (name == "step_size") require(value >= 0.0, "step_size must be non-negative");
  if (name == "momentum") require(value >= 0.0, "momentum must be non-negative");
}

}  // namespace

HyperparameterPoint::HyperparameterPoint(
    std::initializer_list<std::pair<const std::string, double>> values) {
  for (const auto& [name, value] : values) set(name, value);
}

void HyperparameterPoint::set(const std::string& name, double value) {
  validate_known_names(name, value);
  values_[name] = value;
}

double HyperparameterPoint::at(std::string_view name) const {
  auto it = values_.find(std::string(name));
  if (it == values_.end())
    throw std::invalid_argument("missing hyperparameter: " + std::string(name));
  return it->second;
}

bool HyperparameterPoint::contains(std::string_view name) const {
  return values_.count(std::string(name)) != 0;
}

AlgorithmSpec AlgorithmSpec::gd(int n_iterations) {
  return {"gd", {"step_size"}, n_iterations};
}

AlgorithmSpec AlgorithmSpec::heavy_ball(int n_iterations) {
  return {"heavy_ball", {"step_size", "momentum"}, n_iterations};
}

void AlgorithmSpec::validate() const {
  require(name == "gd" || name == "heavy_ball", "unknown algorithm: " + name);
  require(n_iterations >= 1, "n_iterations must be at least 1");
  const std::vector<std::string> expected =
      name == "gd" ? std::vector<std::string>{"step_size"}
                   : std::vector<std::string>{"step_size", "momentum"};
  require(hyperparameter_names == expected, "hyperparameter names do not match the algorithm");
}

Vector hb_step(const Vector& x_k, const Vector& x_km1, const HyperparameterPoint& alpha,
               const Vector& grad) {
  require(x_k.size() == x_km1.size() && x_k.size() == grad.size(), "dimension mismatch");
  const double step = alpha.at("step_size");
  const double momentum = alpha.at("momentum");
  return x_k - step * grad + momentum * (x_k - x_km1);
}

namespace {

void check_point_matches(const AlgorithmSpec& spec, const HyperparameterPoint& alpha) {
  std::set<std::string> declared(spec.hyperparameter_names.begin(),
                                 spec.hyperparameter_names.end());
  std::set<std::string> given;
  for (const auto& [name, value] : alpha.values()) given.insert(name);
  require(declared == given, "hyperparameter names must match the algorithm's declared set");
}

// One arithmetic path for both algorithms: gd is heavy-ball with momentum 0,
// so the momentum-0 equivalence is exact rather than a compiler accident.
template <typename Visit>
void unroll_visit(const AlgorithmSpec& spec, const ProblemInstance& instance, const Vector& x0,
                  const HyperparameterPoint& alpha, Visit&& visit) {
  spec.validate();
  check_point_matches(spec, alpha);
  require(x0.size() == instance.dim(), "x0 dimension mismatch");
  const double step = alpha.at("step_size");
  const double momentum = spec.name == "gd" ? 0.0 : alpha.at("momentum");
  Vector x = x0;
  Vector x_prev = x0;  // x^(-1) = x^(0)
  visit(0, x);
  for (int k = 0; k < spec.n_iterations; ++k) {
    const Vector grad = instance.gradient(x);
    Vector x_next = x - step * grad + momentum * (x - x_prev);
    x_prev = std::move(x);
    x = std::move(x_next);
    visit(k + 1, x);
  }
}

}  // namespace

Trajectory unroll(const AlgorithmSpec& spec, const ProblemInstance& instance, const Vector& x0,
                  const HyperparameterPoint& alpha) {
  Trajectory t;
  t.iterates.reserve(static_cast<std::size_t>(spec.n_iterations) + 1);
  t.losses.reserve(static_cast<std::size_t>(spec.n_iterations) + 1);
  unroll_visit(spec, instance, x0, alpha, [&](int, const Vector& x) {
    t.iterates.push_back(x);
    t.losses.push_back(instance.loss(x));
  });
  return t;
}

double final_loss(const AlgorithmSpec& spec, const ProblemInstance& instance, const Vector& x0,
                  const HyperparameterPoint& alpha) {
  double loss = 0.0;
  unroll_visit(spec, instance, x0, alpha, [&](int k, const Vector& x) {
    if (k == spec.n_iterations) loss = instance.loss(x);
  });
  return loss;
}

HyperparameterPoint worst_case_hyperparameters(std::string_view algorithm, double mu_minus,
                                               double l_plus) {
  require(mu_minus > 0.0, "mu_minus must be positive");
  require(l_plus >= mu_minus, "l_plus must be at least mu_minus");
  if (algorithm == "gd") {
    return {{"step_size", 2.0 / (l_plus + mu_minus)}};
  }
  if (algorithm == "heavy_ball") {
    const double root_l = std::sqrt(l_plus);
    const double root_mu = std::sqrt(mu_minus);
    const double denom = root_l + root_mu;
    const double step = (2.0 / denom) * (2.0 / denom);
    const double ratio = (root_l - root_mu) / denom;
    return {{"step_size", step}, {"momentum", ratio * ratio}};
  }
  throw std::invalid_argument("unknown algorithm: " + std::string(algorithm));
}

double gd_contraction_rho(const HyperparameterPoint& alpha, double mu, double ell, int k) {
  require(mu > 0.0, "mu must be positive");
  require(ell >= mu, "ell must be at least mu");
  require(k >= 0, "k must be non-negative");
  const double step = alpha.at("step_size");
  const double base = std::max(std::abs(1.0 - step * mu), std::abs(1.0 - step * ell));
  return std::pow(base, 2.0 * k);
}

}  // namespace pacopt
