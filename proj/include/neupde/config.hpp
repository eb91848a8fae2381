#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "neupde/domain.hpp"

namespace neupde {

/// Configuration problems carry exit code 2 at the CLI boundary.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key-value configuration with dotted sections:
///   domain.kind = interval
///   domain.params = -1, 1
///   problem.preset = manufactured_g0
///   run.seed = 42
/// '#' starts a comment; values are free text until end of line.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::filesystem::path& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  /// The master seed is mandatory: no entropy default.
  std::uint64_t seed() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  /// Sorted "key = value" lines; the content-hash input.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> entries_;
};

/// Builds the domain from `domain.kind` and `domain.params`.
std::shared_ptr<const Domain> domain_from_config(const KeyValueConfig& cfg);

}  // namespace neupde
