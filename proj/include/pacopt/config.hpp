#pragma once

#include "pacopt/common.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pacopt {

/**
 * Flat key-value run configuration ("key = value" lines, '#' comments).
 * Keys are validated against the documented schema; unknown keys are errors.
 * CLI flags override file entries through set().
 */
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

  /** Sorted "key = value" lines; the config hash is FNV-1a over this text. */
  std::string canonical_text() const;
  std::uint64_t hash() const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace pacopt
