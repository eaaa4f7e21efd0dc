#include "pacopt/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace pacopt {

namespace {

constexpr const char* kMagic = "pacopt-dataset";
constexpr int kVersion = 1;

void write_vector(std::ostream& out, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << format_double(v(i));
  }
  out << '\n';
}

void write_instances(std::ostream& out, const std::string& name,
                     const std::vector<ProblemInstance>& instances) {
  out << "partition " << name << ' ' << instances.size() << '\n';
  for (const auto& instance : instances) {
    if (instance.is_diagonal()) {
      out << "diag " << format_double(instance.mu()) << ' ' << format_double(instance.ell())
          << '\n';
      write_vector(out, instance.diag());
    } else {
      out << "dense " << format_double(instance.mu()) << ' ' << format_double(instance.ell())
          << '\n';
      const Matrix& a = instance.matrix();
      for (Index i = 0; i < a.rows(); ++i) write_vector(out, a.row(i).transpose());
    }
    write_vector(out, instance.rhs());
  }
}

double read_double(std::istream& in, const char* what) {
  double v = 0.0;
  if (!(in >> v)) throw std::runtime_error(std::string("dataset parse error: ") + what);
  return v;
}

std::uint64_t read_uint(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  if (!(in >> v)) throw std::runtime_error(std::string("dataset parse error: ") + what);
  return v;
}

std::string read_word(std::istream& in, const char* what) {
  std::string w;
  if (!(in >> w)) throw std::runtime_error(std::string("dataset parse error: ") + what);
  return w;
}

void expect_word(std::istream& in, const std::string& expected) {
  const std::string w = read_word(in, expected.c_str());
  if (w != expected)
    throw std::runtime_error("dataset parse error: expected '" + expected + "', got '" + w + "'");
}

Vector read_vector(std::istream& in, Index n, const char* what) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = read_double(in, what);
  return v;
}

std::vector<ProblemInstance> read_instances(std::istream& in, const std::string& name, Index n) {
  expect_word(in, "partition");
  expect_word(in, name);
  const std::uint64_t count = read_uint(in, "partition count");
  std::vector<ProblemInstance> instances;
  instances.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::string kind = read_word(in, "instance kind");
    const double mu = read_double(in, "mu");
    const double ell = read_double(in, "ell");
    if (kind == "diag") {
      Vector d = read_vector(in, n, "diagonal");
      Vector rhs = read_vector(in, n, "rhs");
      instances.push_back(ProblemInstance::diagonal(std::move(d), std::move(rhs), mu, ell));
    } else if (kind == "dense") {
      Matrix a(n, n);
      for (Index i = 0; i < n; ++i) a.row(i) = read_vector(in, n, "matrix row").transpose();
      Vector rhs = read_vector(in, n, "rhs");
      instances.push_back(
          ProblemInstance::dense_with_spectrum(std::move(a), std::move(rhs), mu, ell));
    } else {
      throw std::runtime_error("dataset parse error: unknown instance kind '" + kind + "'");
    }
  }
  return instances;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& dataset) {
  dataset.config.validate();
  out << kMagic << ' ' << kVersion << '\n';
  out << "n " << dataset.config.n << '\n';
  out << "family "
      << (dataset.config.family == SpectrumFamily::FixedSpectrum ? "fixed" : "varying") << '\n';
  out << "mu_fixed " << format_double(dataset.config.mu_fixed) << '\n';
  out << "l_min " << format_double(dataset.config.l_min) << '\n';
  out << "l_max " << format_double(dataset.config.l_max) << '\n';
  out << "config_seed " << dataset.config.seed << '\n';
  out << "master_seed " << dataset.master_seed << '\n';
  out << "counts " << dataset.counts.prior_1 << ' ' << dataset.counts.prior_2 << ' '
      << dataset.counts.train << ' ' << dataset.counts.test << '\n';
  out << "rhs_mean\n";
  write_vector(out, dataset.config.rhs_mean);
  out << "rhs_cov\n";
  for (Index i = 0; i < dataset.config.n; ++i)
    write_vector(out, dataset.config.rhs_cov.row(i).transpose());
  write_instances(out, "prior_1", dataset.prior_1);
  write_instances(out, "prior_2", dataset.prior_2);
  write_instances(out, "train", dataset.train);
  write_instances(out, "test", dataset.test);
  out << "end\n";
}

void write_dataset_file(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_dataset(out, dataset);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset read_dataset(std::istream& in) {
  expect_word(in, kMagic);
  const std::uint64_t version = read_uint(in, "version");
  if (version != kVersion)
    throw std::runtime_error("unsupported dataset version " + std::to_string(version));
  Dataset ds;
  expect_word(in, "n");
  ds.config.n = static_cast<Index>(read_uint(in, "n"));
  expect_word(in, "family");
  const std::string family = read_word(in, "family");
  if (family == "fixed")
    ds.config.family = SpectrumFamily::FixedSpectrum;
  else if (family == "varying")
    ds.config.family = SpectrumFamily::VaryingSpectrum;
  else
    throw std::runtime_error("dataset parse error: unknown family '" + family + "'");
  expect_word(in, "mu_fixed");
  ds.config.mu_fixed = read_double(in, "mu_fixed");
  expect_word(in, "l_min");
  ds.config.l_min = read_double(in, "l_min");
  expect_word(in, "l_max");
  ds.config.l_max = read_double(in, "l_max");
  expect_word(in, "config_seed");
  ds.config.seed = read_uint(in, "config_seed");
  expect_word(in, "master_seed");
  ds.master_seed = read_uint(in, "master_seed");
  expect_word(in, "counts");
  ds.counts.prior_1 = read_uint(in, "counts");
  ds.counts.prior_2 = read_uint(in, "counts");
  ds.counts.train = read_uint(in, "counts");
  ds.counts.test = read_uint(in, "counts");
  expect_word(in, "rhs_mean");
  ds.config.rhs_mean = read_vector(in, ds.config.n, "rhs_mean");
  expect_word(in, "rhs_cov");
  ds.config.rhs_cov = Matrix(ds.config.n, ds.config.n);
  for (Index i = 0; i < ds.config.n; ++i)
    ds.config.rhs_cov.row(i) = read_vector(in, ds.config.n, "rhs_cov row").transpose();
  ds.prior_1 = read_instances(in, "prior_1", ds.config.n);
  ds.prior_2 = read_instances(in, "prior_2", ds.config.n);
  ds.train = read_instances(in, "train", ds.config.n);
  ds.test = read_instances(in, "test", ds.config.n);
  expect_word(in, "end");
  return ds;
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return read_dataset(in);
}

}  // namespace pacopt
