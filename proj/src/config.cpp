#include "pacopt/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pacopt {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "seed",
      "out_dir",
      "data_file",
      "problem.family",
      "problem.n",
      "problem.mu_fixed",
      "problem.l_min",
      "problem.l_max",
      "algorithm",
      "iterations",
      "regime",
      "epsilon",
      "grid_size",
      "counts.prior_1",
      "counts.prior_2",
      "counts.train",
      "counts.test",
      "particles",
      "weighting",
      "prior.epsilon_conv",
      "prior.iterations",
      "prior.keep_fraction",
      "targets",
      "posterior_convergence.iteration_counts",
      "posterior_convergence.sigma_scale",
      "conv_prob.test_sets",
      "conv_prob.test_set_size",
      "verify.datasets",
      "verify.samples",
  };
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw std::invalid_argument("unknown config key: " + key);
  entries_[key] = trim(value);
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

bool RunConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size())
    throw std::invalid_argument("config value for " + key + " is not a number");
  return v;
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::size_t used = 0;
  const std::int64_t v = std::stoll(it->second, &used);
  if (used != it->second.size())
    throw std::invalid_argument("config value for " + key + " is not an integer");
  return v;
}

std::uint64_t RunConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::size_t used = 0;
  const std::uint64_t v = std::stoull(it->second, &used);
  if (used != it->second.size())
    throw std::invalid_argument("config value for " + key + " is not an unsigned integer");
  return v;
}

std::vector<double> RunConfig::get_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> values;
  std::string item;
  std::istringstream in(it->second);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  if (values.empty()) throw std::invalid_argument("config list for " + key + " is empty");
  return values;
}

std::vector<int> RunConfig::get_int_list(const std::string& key,
                                         const std::vector<int>& fallback) const {
  std::vector<double> raw = get_list(key, {});
  if (raw.empty()) return fallback;
  std::vector<int> values;
  values.reserve(raw.size());
  for (double v : raw) values.push_back(static_cast<int>(v));
  return values;
}

std::string RunConfig::canonical_text() const {
  std::string text;
  for (const auto& [key, value] : entries_) {
    if (key == "out_dir") continue;  // output location is not experiment identity
    text += key;
    text += " = ";
    text += value;
    text += '\n';
  }
  return text;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical_text()); }

}  // namespace pacopt
