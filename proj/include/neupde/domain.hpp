#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "neupde/vec.hpp"

namespace neupde {

/// Smooth bounded convex domain D with the geometric primitives every other
/// module consumes.  The interior function psi is calibrated so |grad psi| = 1
/// on {psi = 0}, which makes grad psi the unit inward normal on the boundary.
/// The penalization field is delta(x) = grad dist(x, closure(D))^2
/// = 2 (x - project(x)); it vanishes on the closure and satisfies
/// <grad psi, delta> <= 0 everywhere.
class Domain {
 public:
  virtual ~Domain() = default;

  virtual std::size_t dim() const = 0;
  /// psi(x): positive inside, zero on the boundary, negative outside.
  virtual double interior_fn(const Vec& x) const = 0;
  virtual Vec interior_grad(const Vec& x) const = 0;
  /// Closest point of closure(D).  Convexity makes it single-valued.
  virtual Vec project(const Vec& x) const = 0;
  virtual double dist_sq(const Vec& x) const = 0;
  /// Unit inward normal; meaningful for x on (or projected to) the boundary.
  virtual Vec inward_normal(const Vec& x) const = 0;
  virtual std::pair<Vec, Vec> bounding_box() const = 0;
  virtual double diameter() const = 0;
  virtual std::string describe() const = 0;

  Vec penal_delta(const Vec& x) const { return 2.0 * (x - project(x)); }
  bool contains(const Vec& x) const { return interior_fn(x) >= 0.0; }
};

class Interval final : public Domain {
 public:
  Interval(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }

  std::size_t dim() const override { return 1; }
  double interior_fn(const Vec& x) const override;
  Vec interior_grad(const Vec& x) const override;
  Vec project(const Vec& x) const override;
  double dist_sq(const Vec& x) const override;
  Vec inward_normal(const Vec& x) const override;
  std::pair<Vec, Vec> bounding_box() const override;
  double diameter() const override { return b_ - a_; }
  std::string describe() const override;

 private:
  double a_, b_;
};

class Ball final : public Domain {
 public:
  Ball(Vec center, double radius);

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

  std::size_t dim() const override { return center_.size(); }
  double interior_fn(const Vec& x) const override;
  Vec interior_grad(const Vec& x) const override;
  Vec project(const Vec& x) const override;
  double dist_sq(const Vec& x) const override;
  Vec inward_normal(const Vec& x) const override;
  std::pair<Vec, Vec> bounding_box() const override;
  double diameter() const override { return 2.0 * radius_; }
  std::string describe() const override;

 private:
  Vec center_;
  double radius_;
};

std::shared_ptr<const Interval> make_interval(double a, double b);
std::shared_ptr<const Ball> make_ball(const Vec& center, double radius);

/// Returns nullptr when the domain is not a 1-d interval.
const Interval* as_interval(const Domain& dom);

/// Result of sampling-based verification of the geometric identities.
struct GeometryReport {
  long samples = 0;
  // worst observed violations, with the offending points
  double max_sign_violation = 0.0;           // psi sign vs containment
  double max_normal_calibration = 0.0;       // | |grad psi| - 1 | on boundary
  double max_delta_gradient_error = 0.0;     // delta vs FD gradient of dist^2
  double max_delta_inside = 0.0;             // |delta| on closure(D)
  double max_psi_delta_product = 0.0;        // max <grad psi, delta>
  double max_projection_drift = 0.0;         // |project(project(x)) - project(x)|
  double max_dist_mismatch = 0.0;            // | |x-project(x)|^2 - dist_sq |
  Vec worst_point;                           // point with the largest violation
  bool pass(double tol) const;
  std::string summary() const;
};

GeometryReport geometry_selfcheck(const Domain& dom, long samples,
                                  std::uint64_t seed);

}  // namespace neupde
