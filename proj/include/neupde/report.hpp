#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "neupde/grid_function.hpp"

namespace neupde {

/// Writes via a temporary file plus rename; a killed run never leaves a
/// partially written file under the final name.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

std::string content_hash_hex(const std::string& content);

struct CompareOptions {
  double se_factor = 3.0;      // joint standard-error multiplier
  double bias_allowance = 0.01;  // additive discretization allowance
};

struct CompareRow {
  double t = 0.0, x = 0.0;
  double value_a = 0.0, value_b = 0.0;
  double diff = 0.0, tol = 0.0;
  bool pass = true;
};

struct CompareResult {
  std::vector<CompareRow> rows;
  bool pass = true;
  double max_diff = 0.0;
  double worst_margin = 0.0;  // max of diff - tol
  std::string to_csv() const;
};

/// Pointwise comparison on the shared grid; grids must carry identical
/// node sets.
CompareResult compare_grids(const GridFunction& a, const GridFunction& b,
                            const CompareOptions& opts);

/// JSON-lines run manifest: events accumulate in memory and land atomically.
class Manifest {
 public:
  void event(const std::string& json_line) { lines_.push_back(json_line); }
  void write(const std::filesystem::path& path) const;
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

/// Run summary: configuration echo, content hash, emitted tables, metrics
/// and per-check verdicts.  Everything needed to recompute the verdicts is
/// in the referenced tables.
struct SolveReport {
  std::string config_echo;
  std::string config_hash;
  std::vector<std::string> tables;
  std::map<std::string, double> metrics;
  std::map<std::string, bool> verdicts;

  bool all_pass() const;
  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace neupde
