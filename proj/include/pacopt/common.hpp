#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pacopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/** FNV-1a 64-bit over an arbitrary byte string. */
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/**
 * Derives an independent sub-seed from a master seed and a label.
 * Adding a new label never disturbs the stream of an existing one.
 */
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((master >> (8 * i)) & 0xff);
  return fnv1a64(label, fnv1a64(std::string_view(bytes, 8)));
}

/** Shortest decimal text that round-trips a double exactly (17 significant digits). */
std::string format_double(double value);

inline void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace pacopt
