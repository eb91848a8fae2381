#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "neupde/domain.hpp"
#include "neupde/vec.hpp"

namespace neupde {

/// Problem data of the terminal-value Neumann problem
///   dt u + 1/2 Lap u - div g(t,x,u,grad u) + f(t,x,u,grad u) = 0 on [0,T] x D
///   u(T,.) = terminal
///   <grad u, n> - 2<g, n> + h(t,x,u) = 0 on [0,T] x boundary(D)
/// with n the unit inward normal.  In linear mode f, g, h ignore their (y, z)
/// arguments entirely.  A nonzero drift b is folded into the reaction term by
/// the solvers, so the built-in families all carry b = 0.
struct Coefficients {
  using Scalar = std::function<double(double, const Vec&, double, const Vec&)>;
  using Field = std::function<Vec(double, const Vec&, double, const Vec&)>;
  using Boundary = std::function<double(double, const Vec&, double)>;

  std::function<double(const Vec&)> terminal;  // Phi
  Scalar reaction;                             // f(t,x,y,z)
  Field divergence_field;                      // g(t,x,y,z)
  Boundary boundary_reaction;                  // h(t,x,y)
  std::function<Vec(const Vec&)> drift;        // b(x); empty means zero
  double horizon = 1.0;                        // T
  bool linear = true;

  /// Optional separable structure g(t,x) = time_factor(t) * space_field(x);
  /// lets the lift carry an analytic time derivative.
  struct SeparableG {
    std::function<double(double)> time_factor;
    std::function<double(double)> time_factor_dt;
    std::function<Vec(const Vec&)> space_field;
  };
  std::optional<SeparableG> separable_g;

  /// Closed-form solution when the family is manufactured from one.
  std::optional<std::function<double(double, const Vec&)>> exact_solution;

  std::string name;

  bool has_drift() const { return static_cast<bool>(drift); }
  double f(double t, const Vec& x, double y, const Vec& z) const {
    return reaction(t, x, y, z);
  }
  Vec g(double t, const Vec& x, double y, const Vec& z) const {
    return divergence_field(t, x, y, z);
  }
  double h(double t, const Vec& x, double y) const {
    return boundary_reaction(t, x, y);
  }
};

/// Structural constants the estimates depend on.  The two derived feasibility
/// conditions (beta * ||Tr||^2 < 1 and 2*sqrt(2)*gamma < 1) gate the Picard
/// drivers.
struct Assumptions {
  double alpha = 0.0;       // one-sided/Lipschitz constant of f in (y,z)
  double beta = 0.0;        // boundary monotonicity constant of h
  double gamma = 0.0;       // Lipschitz constant of each g component in (y,z)
  double k_bound = 1.0;     // growth bound K
  double c_space = 1.0;     // spatial Lipschitz constant C
  double c0_drift = 0.0;    // Lipschitz constant of b
  double trace_norm = 1.2;  // operator norm of H^1(D) -> L^2(boundary)

  bool beta_trace_ok() const { return beta * trace_norm * trace_norm < 1.0; }
  bool gamma_small() const { return 2.0 * std::sqrt(2.0) * gamma < 1.0; }
};

struct Preset {
  Coefficients coef;
  Assumptions assume;
};

/// Built-in coefficient families, selected by name:
///   constant             Phi = c, f = g = h = 0            (exact u = c)
///   manufactured_g0      u = e^{-t} cos(pi x), g = h = 0
///   manufactured_gx      u = e^{-t} x^2/2, g = e^{-t} x/2, h = 0
///   manufactured_h       u = e^{-t} x^2/2, g = 0, h = e^{-t}
///   nonlinear_small_gamma  nonlinear (alpha, beta, gamma) = (0.2, 0.1, 0.1)
Preset make_preset(const std::string& name, const Interval& dom,
                   double horizon = 1.0, double const_value = 1.0);

std::vector<std::string> preset_names();

/// Sampling-based refutation check of the declared constants.  Sampling can
/// only refute the structural conditions, never prove them; reports are
/// advisory.
struct AssumptionCheck {
  struct Item {
    std::string condition;
    double observed = 0.0;
    double declared = 0.0;
    bool violated = false;
  };
  std::vector<Item> items;
  bool any_violation = false;
  std::string summary() const;
};

AssumptionCheck check_assumptions(const Coefficients& coef,
                                  const Assumptions& assume, long probes,
                                  std::uint64_t seed);

/// Discrete Rayleigh-quotient estimate of the trace operator norm over the
/// P1 space on `nodes` grid points.  Only 1-d intervals are supported;
/// returns nullopt otherwise and callers fall back to a configured value.
std::optional<double> estimate_trace_norm(const Domain& dom, int nodes);

/// Quotient ||v||_{L^2(boundary)} / ||v||_{H^1(D)} of a single nodal
/// function on the interval grid (exposed for tests).
double trace_quotient(const Interval& dom, const std::vector<double>& nodal);

}  // namespace neupde
