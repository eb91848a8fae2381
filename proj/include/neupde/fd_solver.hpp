#pragma once

#include <functional>
#include <string>
#include <vector>

#include "neupde/coefficients.hpp"
#include "neupde/contraction.hpp"
#include "neupde/domain.hpp"
#include "neupde/grid_function.hpp"
#include "neupde/picard.hpp"

namespace neupde {

/// Deterministic 1-d grid solver for the linear terminal-value Neumann
/// problem, marching backward from u(T,.) = Phi with a theta-scheme
/// (theta = 0.5 is Crank-Nicolson).  The spatial system is the P1 assembly
/// of the weak form, so the divergence field enters only through the load
/// integral( g phi' ) and the flux condition is natural: no derivative of g
/// is ever taken.
struct FdConfig {
  int x_nodes = 201;
  int t_steps = 400;
  double theta = 0.5;  // >= 0.5 unconditionally stable
};

GridFunction solve_linear_fd(const Interval& dom, const Coefficients& coef,
                             const FdConfig& cfg);

/// Frozen-coefficient linearization: f, g, h evaluated at the grid iterate
/// (u, grad u); the result is a linear coefficient set.
Coefficients freeze_coefficients(const Coefficients& coef,
                                 const GridFunction& u);

/// Discrete e^{theta s}-weighted H^1 norm of (a - b) over the shared grid.
double weighted_h1_distance(const GridFunction& a, const GridFunction& b,
                            double theta);

/// Picard iteration from u = 0 with frozen coefficients per step; distances
/// are measured in the analytic-witness weighted norm.
PicardResult picard_solve_fd(const Interval& dom, const Coefficients& coef,
                             const Assumptions& assume, const FdConfig& cfg,
                             const PicardOptions& opts);

/// Smooth space-time test function with analytic derivatives.
struct TestFunction {
  std::string name;
  std::function<double(double, double)> phi;
  std::function<double(double, double)> dphi_dt;
  std::function<double(double, double)> dphi_dx;
};

/// Polynomials x trigonometric products, 12 functions, mapped to the domain.
std::vector<TestFunction> default_test_bank(const Interval& dom);

struct ResidualReport {
  double max_residual = 0.0;
  std::vector<std::pair<std::string, double>> per_test;
};

/// Evaluates the full weak identity of the problem for each test function by
/// composite quadrature over the grid: time terms, energy term, divergence
/// and reaction loads, and the boundary term.  Smallness certifies u as a
/// discrete weak solution; perturbed inputs inflate the residual.
ResidualReport weak_residual(const GridFunction& u, const Coefficients& coef,
                             const Interval& dom,
                             const std::vector<TestFunction>& bank);

}  // namespace neupde
