#pragma once

#include "pacopt/common.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace pacopt {

enum class SpectrumFamily { FixedSpectrum, VaryingSpectrum };

/**
 * One quadratic problem: minimize loss(x) = 0.5 * ||A x - b||^2.
 *
 * The matrix is either dense (fixed-spectrum family) or diagonal
 * (varying-spectrum family). Every instance carries mu and ell, the extreme
 * eigenvalues of A^T A; mu must be strictly positive.
 */
class ProblemInstance {
 public:
  /** Dense instance; mu and ell are computed from A^T A. Throws if mu <= 0. */
  static ProblemInstance dense(Matrix a, Vector rhs);

  /** Dense instance with a precomputed spectrum (dataset generation / IO path). */
  static ProblemInstance dense_with_spectrum(Matrix a, Vector rhs, double mu, double ell);

  /** Diagonal instance; entries are the diagonal of A. */
  static ProblemInstance diagonal(Vector diag, Vector rhs, double mu, double ell);

  bool is_diagonal() const { return diagonal_; }
  const Matrix& matrix() const;
  const Vector& diag() const;
  const Vector& rhs() const { return rhs_; }
  double mu() const { return mu_; }
  double ell() const { return ell_; }
  Index dim() const { return rhs_.size(); }

  /** 0.5 * ||A x - b||^2, evaluated through the residual (never negative). */
  double loss(const Vector& x) const;

  /** A^T (A x - b). */
  Vector gradient(const Vector& x) const;

 private:
  ProblemInstance() = default;

  bool diagonal_ = false;
  Matrix a_;      // dense family
  Vector d_;      // diagonal family
  Vector rhs_;
  double mu_ = 0.0;
  double ell_ = 0.0;
};

/**
 * Distribution over problem instances. The right-hand side is Gaussian
 * N(rhs_mean, rhs_cov) for both families. The fixed-spectrum family shares one
 * dense matrix across all instances; the varying-spectrum family draws a fresh
 * diagonal spectrum per instance with mu fixed and ell ~ U[l_min, l_max].
 */
struct ProblemDistributionConfig {
  Index n = 50;
  SpectrumFamily family = SpectrumFamily::VaryingSpectrum;
  Vector rhs_mean;
  Matrix rhs_cov;
  double mu_fixed = 0.05;
  double l_min = 1.0;
  double l_max = 5000.0;
  std::uint64_t seed = 0;  // seeds the shared matrix of the fixed family

  void validate() const;
};

struct PartitionCounts {
  std::size_t prior_1 = 0;
  std::size_t prior_2 = 0;
  std::size_t train = 0;
  std::size_t test = 0;
};

struct Dataset {
  ProblemDistributionConfig config;
  PartitionCounts counts;
  std::uint64_t master_seed = 0;
  std::vector<ProblemInstance> prior_1;
  std::vector<ProblemInstance> prior_2;
  std::vector<ProblemInstance> train;
  std::vector<ProblemInstance> test;
};

/**
 * Dense n x n matrix whose entries are a uniform integer in {-10, ..., 10}
 * plus standard normal noise. Deterministic in (n, seed).
 */
Matrix make_fixed_spectrum_matrix(Index n, std::uint64_t seed);

/**
 * Right-hand-side moments: mean entries uniform integers in {-5, ..., 5}, and
 * covariance S^T S where S has uniform integer entries in {-5, ..., 5}.
 */
std::pair<Vector, Matrix> make_rhs_moments(Index n, std::uint64_t seed);

/** `count` Gaussian right-hand sides N(rhs_mean, rhs_cov); Cholesky-based. */
std::vector<Vector> sample_rhs(const ProblemDistributionConfig& config, std::size_t count,
                               std::uint64_t seed);

/**
 * Diagonal instance whose entries linearly interpolate sqrt(mu) .. sqrt(ell)
 * and are then randomly permuted. Carries (mu, ell) exactly.
 */
ProblemInstance make_varying_spectrum_instance(double mu, double ell, Index n, Vector rhs,
                                               std::uint64_t seed);

/** `count` instances drawn from the configured family. */
std::vector<ProblemInstance> sample_instances(const ProblemDistributionConfig& config,
                                              std::size_t count, std::uint64_t seed);

/**
 * Four disjoint i.i.d. partitions. Each partition's stream is derived from
 * (seed, partition name), so changing one count never disturbs the others.
 */
Dataset generate_dataset(const ProblemDistributionConfig& config, const PartitionCounts& counts,
                         std::uint64_t seed);

}  // namespace pacopt
