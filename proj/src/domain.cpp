#include "neupde/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "neupde/rng.hpp"

namespace neupde {

// ---------------------------------------------------------------------------
// Interval (a, b):  psi(x) = (x-a)(b-x)/(b-a) has psi' = +1 at a, -1 at b.

Interval::Interval(double a, double b) : a_(a), b_(b) {
  if (!(a < b)) throw std::invalid_argument("interval: need a < b");
}

double Interval::interior_fn(const Vec& x) const {
  const double v = x.x();
  return (v - a_) * (b_ - v) / (b_ - a_);
}

Vec Interval::interior_grad(const Vec& x) const {
  const double v = x.x();
  return Vec{(a_ + b_ - 2.0 * v) / (b_ - a_)};
}

Vec Interval::project(const Vec& x) const {
  return Vec{std::clamp(x.x(), a_, b_)};
}

double Interval::dist_sq(const Vec& x) const {
  const double v = x.x();
  const double d = (v < a_) ? a_ - v : (v > b_) ? v - b_ : 0.0;
  return d * d;
}

Vec Interval::inward_normal(const Vec& x) const {
  const double mid = 0.5 * (a_ + b_);
  return Vec{x.x() <= mid ? 1.0 : -1.0};
}

std::pair<Vec, Vec> Interval::bounding_box() const {
  return {Vec{a_}, Vec{b_}};
}

std::string Interval::describe() const {
  std::ostringstream os;
  os << "interval(" << a_ << "," << b_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Ball:  psi(x) = (r^2 - |x-c|^2) / (2r) gives |grad psi| = 1 on the sphere.

Ball::Ball(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball: need radius > 0");
  if (center_.size() == 0 || center_.size() > Vec::kMaxDim)
    throw std::invalid_argument("ball: unsupported dimension");
}

double Ball::interior_fn(const Vec& x) const {
  return (radius_ * radius_ - norm2(x - center_)) / (2.0 * radius_);
}

Vec Ball::interior_grad(const Vec& x) const {
  return (-1.0 / radius_) * (x - center_);
}

Vec Ball::project(const Vec& x) const {
  const Vec d = x - center_;
  const double r = norm(d);
  if (r <= radius_) return x;
  return center_ + (radius_ / r) * d;
}

double Ball::dist_sq(const Vec& x) const {
  const double r = norm(x - center_);
  const double d = std::max(0.0, r - radius_);
  return d * d;
}

Vec Ball::inward_normal(const Vec& x) const {
  const Vec d = x - center_;
  const double r = norm(d);
  if (r == 0.0) throw std::invalid_argument("ball: normal undefined at center");
  return (-1.0 / r) * d;
}

std::pair<Vec, Vec> Ball::bounding_box() const {
  Vec lo = center_, hi = center_;
  for (std::size_t i = 0; i < center_.size(); ++i) {
    lo[i] -= radius_;
    hi[i] += radius_;
  }
  return {lo, hi};
}

std::string Ball::describe() const {
  std::ostringstream os;
  os << "ball(center=" << center_ << ",r=" << radius_ << ")";
  return os.str();
}

std::shared_ptr<const Interval> make_interval(double a, double b) {
  return std::make_shared<const Interval>(a, b);
}

std::shared_ptr<const Ball> make_ball(const Vec& center, double radius) {
  return std::make_shared<const Ball>(center, radius);
}

const Interval* as_interval(const Domain& dom) {
  return dynamic_cast<const Interval*>(&dom);
}

// ---------------------------------------------------------------------------

bool GeometryReport::pass(double tol) const {
  return max_sign_violation <= tol && max_normal_calibration <= tol &&
         max_delta_inside <= tol && max_projection_drift <= tol &&
         max_dist_mismatch <= tol && max_psi_delta_product <= 1e-12 &&
         max_delta_gradient_error <= 1.0;  // scaled check, see below
}

std::string GeometryReport::summary() const {
  std::ostringstream os;
  os << "samples=" << samples
     << " sign=" << max_sign_violation
     << " normal=" << max_normal_calibration
     << " delta_fd(scaled)=" << max_delta_gradient_error
     << " delta_inside=" << max_delta_inside
     << " psi_delta=" << max_psi_delta_product
     << " proj_idem=" << max_projection_drift
     << " dist=" << max_dist_mismatch
     << " worst_at=" << worst_point;
  return os.str();
}

GeometryReport geometry_selfcheck(const Domain& dom, long samples,
                                  std::uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("geometry_selfcheck: samples > 0");
  GeometryReport rep;
  rep.samples = samples;
  rep.worst_point = Vec(dom.dim(), 0.0);

  auto [lo, hi] = dom.bounding_box();
  const double margin = 0.75 * dom.diameter();
  Xoshiro256 eng(stream_seed(seed, "geometry_selfcheck", 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double worst = -1.0;
  auto track = [&](double v, const Vec& x) {
    if (v > worst) {
      worst = v;
      rep.worst_point = x;
    }
  };

  const std::size_t n = dom.dim();
  for (long s = 0; s < samples; ++s) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = (lo[i] - margin) + (hi[i] - lo[i] + 2.0 * margin) * unif(eng);

    const double psi = dom.interior_fn(x);
    const Vec pi = dom.project(x);
    const Vec delta = dom.penal_delta(x);
    const double dsq = dom.dist_sq(x);

    // psi sign against the projection-based containment
    const bool inside = norm(x - pi) == 0.0;
    double sign_viol = 0.0;
    if (inside && psi < 0.0) sign_viol = -psi;
    if (!inside && psi > 0.0) sign_viol = psi;
    rep.max_sign_violation = std::max(rep.max_sign_violation, sign_viol);
    track(sign_viol, x);

    // |grad psi| = 1 on the boundary: check at the projected boundary point
    if (!inside) {
      const double cal = std::abs(norm(dom.interior_grad(pi)) - 1.0);
      rep.max_normal_calibration = std::max(rep.max_normal_calibration, cal);
      track(cal, pi);
    }

    // delta against the central-difference gradient of dist^2,
    // scaled by the per-point tolerance 1e-6 * (1 + |x|)
    {
      const double h = 1e-5 * (1.0 + norm(x));
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (dom.dist_sq(xp) - dom.dist_sq(xm)) / (2.0 * h);
        err = std::max(err, std::abs(fd - delta[i]));
      }
      const double scaled = err / (1e-6 * (1.0 + norm(x)));
      rep.max_delta_gradient_error = std::max(rep.max_delta_gradient_error, scaled);
      track(scaled * 1e-12, x);
    }

    if (inside) {
      rep.max_delta_inside = std::max(rep.max_delta_inside, norm(delta));
      track(norm(delta), x);
    }

    const double pd = dot(dom.interior_grad(x), delta);
    rep.max_psi_delta_product = std::max(rep.max_psi_delta_product, pd);
    track(pd, x);

    const double idem = norm(dom.project(pi) - pi);
    rep.max_projection_drift = std::max(rep.max_projection_drift, idem);
    track(idem, x);

    const double mismatch = std::abs(norm2(x - pi) - dsq);
    rep.max_dist_mismatch = std::max(rep.max_dist_mismatch, mismatch);
    track(mismatch, x);
  }
  return rep;
}

}  // namespace neupde
