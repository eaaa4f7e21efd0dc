#include "pacopt/problems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pacopt {

namespace {

std::pair<double, double> spectrum_of_gram(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.transpose() * a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const auto& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace

ProblemInstance ProblemInstance::dense(Matrix a, Vector rhs) {
  auto [mu, ell] = spectrum_of_gram(a);
  return dense_with_spectrum(std::move(a), std::move(rhs), mu, ell);
}

ProblemInstance ProblemInstance::dense_with_spectrum(Matrix a, Vector rhs, double mu, double ell) {
  require(a.rows() == a.cols(), "matrix must be square");
  require(a.rows() == rhs.size(), "matrix and rhs dimensions differ");
  require(a.rows() > 0, "instance dimension must be positive");
  require(mu > 0.0, "smallest eigenvalue of A^T A must be positive");
  require(ell >= mu, "eigenvalue bounds out of order");
  ProblemInstance p;
  p.diagonal_ = false;
  p.a_ = std::move(a);
  p.rhs_ = std::move(rhs);
  p.mu_ = mu;
  p.ell_ = ell;
  return p;
}

ProblemInstance ProblemInstance::diagonal(Vector diag, Vector rhs, double mu, double ell) {
  require(diag.size() == rhs.size(), "diagonal and rhs dimensions differ");
  require(diag.size() > 0, "instance dimension must be positive");
  require(mu > 0.0, "smallest eigenvalue of A^T A must be positive");
  require(ell >= mu, "eigenvalue bounds out of order");
  ProblemInstance p;
  p.diagonal_ = true;
  p.d_ = std::move(diag);
  p.rhs_ = std::move(rhs);
  p.mu_ = mu;
  p.ell_ = ell;
  return p;
}

const Matrix& ProblemInstance::matrix() const {
  if (diagonal_) throw std::logic_error("diagonal instance has no dense matrix");
  return a_;
}

const Vector& ProblemInstance::diag() const {
  if (!diagonal_) throw std::logic_error("dense instance has no diagonal");
  return d_;
}

double ProblemInstance::loss(const Vector& x) const {
  require(x.size() == dim(), "x dimension mismatch");
  if (diagonal_) return 0.5 * (d_.cwiseProduct(x) - rhs_).squaredNorm();
  return 0.5 * (a_ * x - rhs_).squaredNorm();
}

Vector ProblemInstance::gradient(const Vector& x) const {
  require(x.size() == dim(), "x dimension mismatch");
  if (diagonal_) return d_.cwiseProduct(d_.cwiseProduct(x) - rhs_);
  return a_.transpose() * (a_ * x - rhs_);
}

void ProblemDistributionConfig::validate() const {
  require(n > 0, "problem dimension must be positive");
  require(rhs_mean.size() == n, "rhs mean dimension mismatch");
  require(rhs_cov.rows() == n && rhs_cov.cols() == n, "rhs covariance dimension mismatch");
  if (family == SpectrumFamily::VaryingSpectrum) {
    require(mu_fixed > 0.0, "mu must be positive");
    require(l_min >= mu_fixed, "spectrum range must lie above mu");
    require(l_max >= l_min, "spectrum range out of order");
  }
}

Matrix make_fixed_spectrum_matrix(Index n, std::uint64_t seed) {
  require(n > 0, "matrix dimension must be positive");
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<int> integer(-10, 10);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = static_cast<double>(integer(engine)) + noise(engine);
  return a;
}

std::pair<Vector, Matrix> make_rhs_moments(Index n, std::uint64_t seed) {
  require(n > 0, "dimension must be positive");
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<int> integer(-5, 5);
  Vector mean(n);
  for (Index i = 0; i < n; ++i) mean(i) = static_cast<double>(integer(engine));
  Matrix s(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) s(i, j) = static_cast<double>(integer(engine));
  return {std::move(mean), s.transpose() * s};
}

namespace {

std::vector<Vector> sample_rhs_with_engine(const Vector& mean, const Matrix& chol_lower,
                                           std::size_t count, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = mean.size();
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector z(n);
    for (Index i = 0; i < n; ++i) z(i) = normal(engine);
    out.push_back(mean + chol_lower * z);
  }
  return out;
}

Matrix cholesky_lower(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("rhs covariance is not positive definite");
  return llt.matrixL();
}

}  // namespace

std::vector<Vector> sample_rhs(const ProblemDistributionConfig& config, std::size_t count,
                               std::uint64_t seed) {
  config.validate();
  if (count == 0) return {};
  std::mt19937_64 engine(seed);
  return sample_rhs_with_engine(config.rhs_mean, cholesky_lower(config.rhs_cov), count, engine);
}

namespace {

Vector interpolated_diagonal(double mu, double ell, Index n, std::mt19937_64& engine) {
  const double lo = std::sqrt(mu);
  const double hi = std::sqrt(ell);
  Vector d(n);
  if (n == 1) {
    d(0) = lo;
  } else {
    for (Index i = 0; i < n; ++i)
      d(i) = lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n - 1));
    d(0) = lo;       // endpoints exact regardless of interpolation rounding
    d(n - 1) = hi;
  }
  std::shuffle(d.data(), d.data() + n, engine);
  return d;
}

ProblemInstance varying_instance_with_engine(double mu, double ell, Index n, Vector rhs,
                                             std::mt19937_64& engine) {
  require(mu > 0.0, "mu must be positive");
  require(ell >= mu, "ell must be at least mu");
  require(n > 0, "instance dimension must be positive");
  require(!(n == 1 && ell > mu), "a 1-dimensional spectrum cannot carry mu < ell");
  Vector d = interpolated_diagonal(mu, ell, n, engine);
  return ProblemInstance::diagonal(std::move(d), std::move(rhs), mu, ell);
}

}  // namespace

ProblemInstance make_varying_spectrum_instance(double mu, double ell, Index n, Vector rhs,
                                               std::uint64_t seed) {
  require(rhs.size() == n, "rhs dimension mismatch");
  std::mt19937_64 engine(seed);
  return varying_instance_with_engine(mu, ell, n, std::move(rhs), engine);
}

namespace {

std::vector<ProblemInstance> sample_instances_with_engine(const ProblemDistributionConfig& config,
                                                          std::size_t count,
                                                          std::mt19937_64& engine) {
  std::vector<ProblemInstance> out;
  out.reserve(count);
  if (count == 0) return out;
  const Matrix chol = cholesky_lower(config.rhs_cov);
  if (config.family == SpectrumFamily::FixedSpectrum) {
    const Matrix a = make_fixed_spectrum_matrix(config.n, derive_seed(config.seed, "matrix"));
    auto [mu, ell] = spectrum_of_gram(a);
    for (std::size_t k = 0; k < count; ++k) {
      Vector rhs = sample_rhs_with_engine(config.rhs_mean, chol, 1, engine).front();
      out.push_back(ProblemInstance::dense_with_spectrum(a, std::move(rhs), mu, ell));
    }
  } else {
    std::uniform_real_distribution<double> ell_draw(config.l_min, config.l_max);
    for (std::size_t k = 0; k < count; ++k) {
      const double ell = ell_draw(engine);
      Vector rhs = sample_rhs_with_engine(config.rhs_mean, chol, 1, engine).front();
      out.push_back(
          varying_instance_with_engine(config.mu_fixed, ell, config.n, std::move(rhs), engine));
    }
  }
  return out;
}

}  // namespace

std::vector<ProblemInstance> sample_instances(const ProblemDistributionConfig& config,
                                              std::size_t count, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 engine(seed);
  return sample_instances_with_engine(config, count, engine);
}

Dataset generate_dataset(const ProblemDistributionConfig& config, const PartitionCounts& counts,
                         std::uint64_t seed) {
  config.validate();
  Dataset ds;
  ds.config = config;
  ds.counts = counts;
  ds.master_seed = seed;
  ds.prior_1 = sample_instances(config, counts.prior_1, derive_seed(seed, "prior_1"));
  ds.prior_2 = sample_instances(config, counts.prior_2, derive_seed(seed, "prior_2"));
  ds.train = sample_instances(config, counts.train, derive_seed(seed, "train"));
  ds.test = sample_instances(config, counts.test, derive_seed(seed, "test"));
  return ds;
}

}  // namespace pacopt
