#include "neupde/lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "neupde/tridiag.hpp"

namespace neupde {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

// quintic smoothstep: 1 for s <= 0, 0 for s >= 1, C^2 in between
double cutoff_ramp(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double u = 1.0 - s;
  return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

}  // namespace

std::vector<double> solve_lift_slice(const std::function<double(double)>& g,
                                     double lo, double hi, int nodes,
                                     LiftBoundary mode,
                                     LiftSliceReport* report) {
  if (nodes < 3) throw std::invalid_argument("lift: nodes >= 3 required");
  if (!(lo < hi)) throw std::invalid_argument("lift: lo < hi required");
  const std::size_t n = static_cast<std::size_t>(nodes);
  const double hx = (hi - lo) / static_cast<double>(nodes - 1);

  // stiffness + mass, and the load integral( g phi' ) with 2-point Gauss
  Tridiag sys(n);
  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool end = (i == 0 || i + 1 == n);
    sys.diag[i] = (end ? 1.0 : 2.0) / hx + (end ? hx / 3.0 : 2.0 * hx / 3.0);
    if (i > 0) sys.lower[i] = -1.0 / hx + hx / 6.0;
    if (i + 1 < n) sys.upper[i] = -1.0 / hx + hx / 6.0;
  }
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double xc = lo + (static_cast<double>(c) + 0.5) * hx;
    const double q1 = xc - 0.5 * hx * kGauss;
    const double q2 = xc + 0.5 * hx * kGauss;
    const double cell = 0.5 * (g(q1) + g(q2));  // = integral(g)/hx over the cell
    rhs[c] -= cell;
    rhs[c + 1] += cell;
  }

  if (mode == LiftBoundary::zero_box) {
    // constrain the endpoint values to zero and drop their couplings
    sys.diag[0] = 1.0;
    sys.upper[0] = 0.0;
    sys.lower[1] = 0.0;
    rhs[0] = 0.0;
    sys.diag[n - 1] = 1.0;
    sys.lower[n - 1] = 0.0;
    sys.upper[n - 2] = 0.0;
    rhs[n - 1] = 0.0;
  }

  std::vector<double> sol = solve_tridiag(sys, rhs);

  if (report != nullptr) {
    const std::vector<double> res = sys.multiply(sol);
    double cond_hi = 0.0, cond_lo = std::numeric_limits<double>::max();
    double max_r = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double off = std::abs(sys.lower[i]) + std::abs(sys.upper[i]);
      cond_hi = std::max(cond_hi, sys.diag[i] + off);
      cond_lo = std::min(cond_lo, std::max(1e-300, sys.diag[i] - off));
      max_r = std::max(max_r, std::abs(res[i] - rhs[i]));
      scale = std::max(scale, std::abs(rhs[i]) + sys.diag[i] * std::abs(sol[i]));
    }
    report->condition_estimate = cond_hi / cond_lo;
    report->max_weak_residual = max_r;
    report->residual_tolerance = 10.0 * std::numeric_limits<double>::epsilon() *
                                 report->condition_estimate *
                                 std::max(1.0, scale);
  }
  return sol;
}

// ---------------------------------------------------------------------------

LiftField LiftField::zero(std::size_t dim) {
  LiftField f;
  f.dim_ = dim;
  f.source_ = "zero";
  f.analytic_value_ = [](double, const Vec&) { return 0.0; };
  f.analytic_grad_ = [dim](double, const Vec&) { return Vec(dim, 0.0); };
  f.analytic_dt_ = [](double, const Vec&) { return 0.0; };
  return f;
}

LiftField LiftField::analytic(std::size_t dim, std::string name,
                              std::function<double(double, const Vec&)> value,
                              std::function<Vec(double, const Vec&)> grad,
                              std::function<double(double, const Vec&)> dt) {
  LiftField f;
  f.dim_ = dim;
  f.source_ = std::move(name);
  f.analytic_value_ = std::move(value);
  f.analytic_grad_ = std::move(grad);
  f.analytic_dt_ = std::move(dt);
  return f;
}

LiftField::Eval LiftField::eval(double t, const Vec& x) const {
  if (analytic_value_) {
    return Eval{analytic_value_(t, x), analytic_grad_(t, x), analytic_dt_(t, x)};
  }
  const std::size_t nx = x_nodes_.size();
  const std::size_t nt = t_nodes_.size();
  const double x0 = x_nodes_.front(), x1 = x_nodes_.back();
  const double t0 = t_nodes_.front(), t1 = t_nodes_.back();
  const double hx = (x1 - x0) / static_cast<double>(nx - 1);
  const double xq = x.x();

  if (t < t0 - 1e-12 || t > t1 + 1e-12)
    throw std::out_of_range("lift eval: t outside the field range");
  const double tc = std::clamp(t, t0, t1);
  std::size_t it = nt - 2;
  if (nt >= 2) {
    const double ht = (t1 - t0) / static_cast<double>(nt - 1);
    it = std::min<std::size_t>(
        nt - 2, static_cast<std::size_t>(std::max(0.0, (tc - t0) / ht)));
  } else {
    it = 0;
  }
  const double tlo = t_nodes_[it];
  const double thi = t_nodes_[std::min(it + 1, nt - 1)];
  const double wt = (thi > tlo) ? (tc - tlo) / (thi - tlo) : 0.0;

  auto interp_row = [&](const std::vector<double>& a, double xx,
                        std::size_t row) {
    const std::size_t base = row * nx;
    const std::size_t ix = std::min<std::size_t>(
        nx - 2, static_cast<std::size_t>(std::max(0.0, (xx - x0) / hx)));
    const double w = (xx - x_nodes_[ix]) / hx;
    return (1.0 - w) * a[base + ix] + w * a[base + ix + 1];
  };
  auto interp = [&](const std::vector<double>& a, double xx) {
    const double lo_v = interp_row(a, xx, it);
    if (nt == 1) return lo_v;
    const double hi_v = interp_row(a, xx, std::min(it + 1, nt - 1));
    return (1.0 - wt) * lo_v + wt * hi_v;
  };

  if (xq >= x0 && xq <= x1) {
    Eval out;
    out.value = interp(values_, xq);
    out.grad = Vec{interp(gradient_, xq)};
    out.dt = interp(dvalues_dt_, xq);
    return out;
  }

  // natural mode keeps a tangent extension on a margin around the interval
  if (mode_ == LiftBoundary::natural) {
    const double edge = (xq < x0) ? x0 : x1;
    const double excess = xq - edge;
    if (std::abs(excess) <= margin_ + 1e-12) {
      const double gv = interp(gradient_, edge);
      Eval out;
      out.value = interp(values_, edge) + gv * excess;
      out.grad = Vec{gv};
      out.dt = interp(dvalues_dt_, edge);
      return out;
    }
  }
  throw std::out_of_range("lift eval: x outside the field range");
}

void LiftField::bounds(double* max_value, double* max_grad,
                       double* max_dt) const {
  double mv = 0.0, mg = 0.0, md = 0.0;
  for (double v : values_) mv = std::max(mv, std::abs(v));
  for (double v : gradient_) mg = std::max(mg, std::abs(v));
  for (double v : dvalues_dt_) md = std::max(md, std::abs(v));
  if (max_value) *max_value = mv;
  if (max_grad) *max_grad = mg;
  if (max_dt) *max_dt = md;
}

namespace {

std::vector<double> nodal_gradient(const std::vector<double>& v, double hx) {
  const std::size_t n = v.size();
  std::vector<double> g(n, 0.0);
  if (n < 3) return g;
  g[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * hx);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (v[i + 1] - v[i - 1]) / (2.0 * hx);
  g[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * hx);
  return g;
}

}  // namespace

LiftField solve_lift_spacetime(const Coefficients& coef, const Interval& dom,
                               int nodes, int t_slices, LiftBoundary mode,
                               double box_margin) {
  if (t_slices < 2) throw std::invalid_argument("lift: t_slices >= 2 required");
  const double diam = dom.diameter();
  const double margin =
      (mode == LiftBoundary::zero_box)
          ? (box_margin > 0.0 ? box_margin : 0.5 * diam)
          : 0.0;
  const double lo = dom.a() - margin;
  const double hi = dom.b() + margin;
  const double T = coef.horizon;

  LiftField f;
  f.dim_ = 1;
  f.mode_ = mode;
  f.source_ = coef.name;
  f.margin_ = (mode == LiftBoundary::natural) ? 0.5 * diam : 0.0;
  f.x_nodes_.resize(nodes);
  const double hx = (hi - lo) / static_cast<double>(nodes - 1);
  for (int i = 0; i < nodes; ++i) f.x_nodes_[i] = lo + i * hx;
  f.t_nodes_.resize(t_slices);
  const double ht = T / static_cast<double>(t_slices - 1);
  for (int i = 0; i < t_slices; ++i) f.t_nodes_[i] = i * ht;

  // cutoff weight: identity inside closure(D), rolls to 0 over 80% of the box
  // margin so the data vanishes well before the box endpoints
  auto weight = [&](double x) {
    if (mode == LiftBoundary::natural) return 1.0;
    if (x >= dom.a() && x <= dom.b()) return 1.0;
    const double over = (x > dom.b()) ? x - dom.b() : dom.a() - x;
    return cutoff_ramp(over / (0.8 * margin));
  };

  const std::size_t nx = static_cast<std::size_t>(nodes);
  const std::size_t nt = static_cast<std::size_t>(t_slices);
  f.values_.assign(nt * nx, 0.0);
  f.dvalues_dt_.assign(nt * nx, 0.0);
  f.gradient_.assign(nt * nx, 0.0);
  f.reports_.resize(nt);

  if (coef.separable_g) {
    const auto& sep = *coef.separable_g;
    auto g2 = [&](double x) {
      return weight(x) * sep.space_field(Vec{x}).x();
    };
    LiftSliceReport rep;
    const std::vector<double> base = solve_lift_slice(g2, lo, hi, nodes, mode, &rep);
    const std::vector<double> base_grad = nodal_gradient(base, hx);
    for (std::size_t it = 0; it < nt; ++it) {
      const double a = sep.time_factor(f.t_nodes_[it]);
      const double da = sep.time_factor_dt(f.t_nodes_[it]);
      for (std::size_t ix = 0; ix < nx; ++ix) {
        f.values_[it * nx + ix] = a * base[ix];
        f.dvalues_dt_[it * nx + ix] = da * base[ix];
        f.gradient_[it * nx + ix] = a * base_grad[ix];
      }
      f.reports_[it] = rep;
    }
    return f;
  }

  const Vec zero_z(1, 0.0);
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = f.t_nodes_[it];
    auto g_slice = [&](double x) {
      return weight(x) * coef.g(t, Vec{x}, 0.0, zero_z).x();
    };
    LiftSliceReport rep;
    std::vector<double> slice;
    try {
      slice = solve_lift_slice(g_slice, lo, hi, nodes, mode, &rep);
    } catch (const std::exception& err) {
      throw std::runtime_error("lift slice " + std::to_string(it) +
                               " failed: " + err.what());
    }
    const std::vector<double> grad = nodal_gradient(slice, hx);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      f.values_[it * nx + ix] = slice[ix];
      f.gradient_[it * nx + ix] = grad[ix];
    }
    f.reports_[it] = rep;
  }
  // central time differences for dt G, one-sided at the ends
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t it = 0; it < nt; ++it) {
      double d;
      if (it == 0)
        d = (-3.0 * f.values_[ix] + 4.0 * f.values_[nx + ix] -
             f.values_[2 * nx + ix]) /
            (2.0 * ht);
      else if (it + 1 == nt)
        d = (3.0 * f.values_[it * nx + ix] - 4.0 * f.values_[(it - 1) * nx + ix] +
             f.values_[(it - 2) * nx + ix]) /
            (2.0 * ht);
      else
        d = (f.values_[(it + 1) * nx + ix] - f.values_[(it - 1) * nx + ix]) /
            (2.0 * ht);
      f.dvalues_dt_[it * nx + ix] = d;
    }
  }
  return f;
}

}  // namespace neupde
