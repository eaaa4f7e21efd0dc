#pragma once

#include "pacopt/common.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace pacopt {

/**
 * CSV writer for experiment outputs. The first line is a provenance comment
 * carrying the config hash and master seed; the second names the columns.
 * Doubles are written with 17 significant digits.
 */
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::uint64_t config_hash, std::uint64_t seed,
            const std::vector<std::string>& columns);

  void write_row(const std::vector<double>& values);
  void write_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

}  // namespace pacopt
