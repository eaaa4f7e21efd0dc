#pragma once

// Shared fixtures for the unit suites: tiny problem builders, file readers,
// and a CSV splitter for checking experiment outputs.

#include "pacopt/algorithms.hpp"
#include "pacopt/common.hpp"
#include "pacopt/pacbayes.hpp"
#include "pacopt/problems.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace pacopt_test {

// 1-d instance with A = (a), so loss(x) = 0.5 * (a*x - b)^2 and the single
// eigenvalue of A^T A is a^2.
inline pacopt::ProblemInstance scalar_instance(double a, double b) {
  pacopt::Vector diag(1), rhs(1);
  diag << a;
  rhs << b;
  return pacopt::ProblemInstance::diagonal(diag, rhs, a * a, a * a);
}

inline pacopt::Vector vec(std::initializer_list<double> values) {
  pacopt::Vector v(static_cast<pacopt::Index>(values.size()));
  pacopt::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

// All non-comment rows of a pacopt CSV, split on commas (header first).
inline std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(split_csv(line));
  }
  return rows;
}

// Numeric data rows only (comment and header skipped).
inline std::vector<std::vector<double>> csv_numeric_rows(const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  const auto lines = read_lines(path);
  bool header_seen = false;
  for (const auto& line : lines) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // first non-comment line is the column header
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split_csv(line)) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pacopt_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Synthetic particle cloud with conditioned-regime-shaped statistics:
// t1 = -risk in [-2, 0], t2 = 1 / p_hat^2 with p_hat in [0.2, 1], Gaussian
// log-densities, and roughly one particle in twenty excluded.
inline pacopt::ParticleCloud make_synthetic_cloud(std::size_t n, std::uint64_t seed) {
  pacopt::ParticleCloud cloud;
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> risk(0.0, 2.0);
  std::uniform_real_distribution<double> p_hat(0.2, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> density(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.particles.push_back(
        pacopt::HyperparameterPoint{{"step_size", 0.01 + 0.001 * static_cast<double>(i)}});
    cloud.prior_log_density.push_back(density(engine));
    const double p = p_hat(engine);
    cloud.statistics.push_back({-risk(engine), 1.0 / (p * p)});
    cloud.excluded.push_back(unit(engine) < 0.05);
  }
  cloud.excluded.front() = false;  // keep at least one active particle
  return cloud;
}

}  // namespace pacopt_test
