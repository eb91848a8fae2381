#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "neupde/coefficients.hpp"
#include "neupde/domain.hpp"
#include "neupde/vec.hpp"

namespace neupde {

/// Endpoint treatment of the 1-d lift problem
///   integral( G' phi' + G phi ) = integral( g phi' )  for trial hats phi.
///
/// zero_box:  solved on an enclosing interval O containing closure(D) with
///            G = 0 at the endpoints of O (trial space excludes the endpoint
///            hats); the data is a smooth cutoff extension of g.
/// natural:   solved on D itself with the endpoint hats kept in the trial
///            space, so the flux condition <grad G, n> = <g, n> on the
///            boundary holds weakly.  This is the variant the probabilistic
///            solvers consume: it makes the boundary condition of the
///            transformed problem plain homogeneous-plus-h, with no leftover
///            flux mismatch.
enum class LiftBoundary { zero_box, natural };

struct LiftSliceReport {
  double max_weak_residual = 0.0;   // over trial hats, |(S G - b)_i|
  double residual_tolerance = 0.0;  // 10 * eps * condition * scale
  double condition_estimate = 1.0;
  bool ok() const { return max_weak_residual <= residual_tolerance; }
};

/// Solves one spatial slice.  `g` is the scalar 1-d field on [lo, hi]
/// (already extended/cut off by the caller in zero_box mode).
std::vector<double> solve_lift_slice(const std::function<double(double)>& g,
                                     double lo, double hi, int nodes,
                                     LiftBoundary mode,
                                     LiftSliceReport* report = nullptr);

/// Space-time lift G with gradient and time derivative on a node grid.
/// Numeric fields are 1-d; analytic fields wrap closed forms in any
/// dimension (used for g = 0 and for analytic families on the disk).
class LiftField {
 public:
  struct Eval {
    double value;
    Vec grad;
    double dt;
  };

  LiftField() = default;

  static LiftField zero(std::size_t dim);
  static LiftField analytic(std::size_t dim, std::string name,
                            std::function<double(double, const Vec&)> value,
                            std::function<Vec(double, const Vec&)> grad,
                            std::function<double(double, const Vec&)> dt);

  Eval eval(double t, const Vec& x) const;

  bool is_numeric() const { return analytic_value_ == nullptr; }
  LiftBoundary mode() const { return mode_; }
  const std::string& source() const { return source_; }
  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& t_nodes() const { return t_nodes_; }
  double value_node(std::size_t it, std::size_t ix) const {
    return values_[it * x_nodes_.size() + ix];
  }
  double dt_node(std::size_t it, std::size_t ix) const {
    return dvalues_dt_[it * x_nodes_.size() + ix];
  }
  double grad_node(std::size_t it, std::size_t ix) const {
    return gradient_[it * x_nodes_.size() + ix];
  }
  const std::vector<LiftSliceReport>& slice_reports() const { return reports_; }
  /// Largest |G|, |grad G|, |dt G| over the grid; the drivers built from the
  /// lift require these to be finite and are recorded in run manifests.
  void bounds(double* max_value, double* max_grad, double* max_dt) const;

  /// Evaluation range in x beyond the node interval (natural mode keeps the
  /// field defined on a margin around D via its edge tangent).
  double extrapolation_margin() const { return margin_; }

  friend LiftField solve_lift_spacetime(const Coefficients& coef,
                                        const Interval& dom, int nodes,
                                        int t_slices, LiftBoundary mode,
                                        double box_margin);

 private:
  // numeric representation
  std::vector<double> x_nodes_, t_nodes_;
  std::vector<double> values_, dvalues_dt_, gradient_;
  std::vector<LiftSliceReport> reports_;
  double margin_ = 0.0;
  LiftBoundary mode_ = LiftBoundary::natural;
  std::string source_;
  std::size_t dim_ = 1;
  // analytic representation
  std::function<double(double, const Vec&)> analytic_value_;
  std::function<Vec(double, const Vec&)> analytic_grad_;
  std::function<double(double, const Vec&)> analytic_dt_;
};

/// Per-slice solve of the lift over [0, T].  In zero_box mode the interval is
/// widened by `box_margin` (default half the domain diameter) and the data is
/// multiplied by a smooth cutoff vanishing before the box ends.  Separable
/// families g(t,x) = g1(t) g2(x) are solved once in space and carry the
/// analytic time derivative g1'(t) G2(x).
LiftField solve_lift_spacetime(const Coefficients& coef, const Interval& dom,
                               int nodes, int t_slices, LiftBoundary mode,
                               double box_margin = -1.0);

}  // namespace neupde
