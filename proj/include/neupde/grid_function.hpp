#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace neupde {

/// Space-time grid representation of a solution: values, the canonical
/// finite-difference gradient of each time slice, and per-node Monte Carlo
/// standard errors (zero for deterministic solvers).  Row-major layout,
/// t-major: index = it * x_nodes.size() + ix.
struct GridFunction {
  std::vector<double> t_nodes;  // ascending
  std::vector<double> x_nodes;  // ascending, uniform spacing
  std::vector<double> values;
  std::vector<double> gradient;
  std::vector<double> se;
  std::vector<std::uint8_t> flags;  // 1 = low-confidence node

  struct Meta {
    std::string solver;
    std::uint64_t seed = 0;
    double dt = 0.0;
    long paths = 0;
    int penalty = 0;
  } meta;

  std::size_t nx() const { return x_nodes.size(); }
  std::size_t nt() const { return t_nodes.size(); }
  double at(std::size_t it, std::size_t ix) const {
    return values[it * nx() + ix];
  }
  double& at(std::size_t it, std::size_t ix) { return values[it * nx() + ix]; }

  double value_at(double t, double x) const;     // bilinear
  double gradient_at(double t, double x) const;  // bilinear on the gradient

  /// The canonical gradient transform: central differences inside, one-sided
  /// second order at the ends.  Recomputable bit-exactly from the values.
  static std::vector<double> gradient_from_values(
      const std::vector<double>& values, std::size_t nt, std::size_t nx,
      double hx);
  void recompute_gradient();

  void write_csv(const std::filesystem::path& path) const;
  static GridFunction read_csv(const std::filesystem::path& path);
};

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace neupde
