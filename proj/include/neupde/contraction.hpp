#pragma once

#include <string>

#include "neupde/coefficients.hpp"

namespace neupde {

/// Contraction parameters of the analytic fixed-point route: distances are
/// measured in the e^{theta s}-weighted H^1 norm and shrink by rho per
/// iteration when the epsilons satisfy the strict feasibility inequality.
struct AnalyticWitness {
  bool feasible = false;
  double eps = 0.0;
  double eps1 = 0.0;
  double theta = 0.0;
  double rho = 0.0;
  std::string binding;  // names the failed constraint when infeasible
};

/// Contraction parameters of the probabilistic route: the norm weight is
/// e^{lambda r + mu L_r} with a delta-weighted local-time term.
struct ProbabilisticWitness {
  bool feasible = false;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  std::string binding;
};

struct ContractionConstants {
  AnalyticWitness analytic;
  ProbabilisticWitness probabilistic;
};

/// Searches the epsilon boxes for parameters satisfying the strict
/// inequalities and returns minimal-rho witnesses, or flags the route
/// infeasible naming the binding constraint.
ContractionConstants contraction_constants(const Assumptions& assume);

}  // namespace neupde
