#pragma once

#include <cstdint>
#include <vector>

#include "neupde/coefficients.hpp"
#include "neupde/contraction.hpp"
#include "neupde/domain.hpp"
#include "neupde/grid_function.hpp"
#include "neupde/lift.hpp"
#include "neupde/picard.hpp"
#include "neupde/stats.hpp"

namespace neupde {

struct McConfig {
  long paths = 10000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double se_cap = 0.05;  // nodes with larger standard error get flagged
};

/// Plain conditional-expectation estimate of the linear problem at one
/// point: reflected paths from (t, x) with the lifted driver
///   f_lift = f + 2 dt(G) + G,   boundary driver h against dL,
/// terminal Phi - 2G(T, .), and the reconstruction u = estimate + 2G(t, x).
/// Fresh paths per evaluation point; no regression.
MeanSe linear_mc_at(const Domain& dom, const Coefficients& coef,
                    const LiftField& lift, double t, const Vec& x,
                    const McConfig& mc, std::uint64_t node_tag);

/// Product-grid driver around linear_mc_at; terminal slice is exact.
GridFunction solve_linear_mc(const Domain& dom, const Coefficients& coef,
                             const LiftField& lift,
                             const std::vector<double>& t_nodes,
                             const std::vector<double>& x_nodes,
                             const McConfig& mc);

/// Penalized analogue: paths follow the penalized scheme and the boundary
/// integral becomes a volume integral weighted by the penalization
/// occupation, -n <delta, n> h dt.
GridFunction solve_penalized_bsde(const Domain& dom, const Coefficients& coef,
                                  const LiftField& lift, int n_penalty,
                                  const std::vector<double>& t_nodes,
                                  const std::vector<double>& x_nodes,
                                  const McConfig& mc);

struct McPicardConfig {
  McConfig mc;
  int lift_nodes = 201;
  int lift_slices = 33;
  long weight_paths = 4000;  // auxiliary ensemble for the norm weights
};

/// Picard iteration on the Monte Carlo backend with common random numbers
/// across iterations.  Distances are measured in the probabilistic-witness
/// weighted norm; the local-time weight factors are estimated once from an
/// auxiliary ensemble started uniformly on D.
PicardResult picard_solve_mc(const Interval& dom, const Coefficients& coef,
                             const Assumptions& assume,
                             const std::vector<double>& t_nodes,
                             const std::vector<double>& x_nodes,
                             const McPicardConfig& cfg,
                             const PicardOptions& opts);

}  // namespace neupde
