#pragma once

#include "pacopt/problems.hpp"

#include <iosfwd>
#include <string>

namespace pacopt {

/**
 * Plain-text dataset format, version 1. Every number is decimal text with 17
 * significant digits, so a write/read cycle reproduces doubles exactly.
 */
void write_dataset(std::ostream& out, const Dataset& dataset);
void write_dataset_file(const std::string& path, const Dataset& dataset);

Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

}  // namespace pacopt
