#include "neupde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "neupde/rng.hpp"
#include "neupde/tridiag.hpp"

namespace neupde {

namespace {

constexpr double kPi = std::numbers::pi;

Coefficients::Scalar zero_scalar() {
  return [](double, const Vec&, double, const Vec&) { return 0.0; };
}

Coefficients::Field zero_field(std::size_t dim) {
  return [dim](double, const Vec&, double, const Vec&) { return Vec(dim, 0.0); };
}

Coefficients::Boundary zero_boundary() {
  return [](double, const Vec&, double) { return 0.0; };
}

double clamp5(double y) { return std::clamp(y, -5.0, 5.0); }

Preset preset_constant(const Interval& dom, double horizon, double c) {
  Preset p;
  p.coef.name = "constant";
  p.coef.horizon = horizon;
  p.coef.linear = true;
  p.coef.terminal = [c](const Vec&) { return c; };
  p.coef.reaction = zero_scalar();
  p.coef.divergence_field = zero_field(dom.dim());
  p.coef.boundary_reaction = zero_boundary();
  p.coef.exact_solution = [c](double, const Vec&) { return c; };
  p.assume = Assumptions{};
  p.assume.k_bound = std::abs(c) + 1.0;
  return p;
}

// u(t,x) = e^{-t} cos(pi x) on (-1,1): zero boundary flux, no divergence term.
Preset preset_manufactured_g0(const Interval& dom, double horizon) {
  Preset p;
  p.coef.name = "manufactured_g0";
  p.coef.horizon = horizon;
  p.coef.linear = true;
  p.coef.terminal = [horizon](const Vec& x) {
    return std::exp(-horizon) * std::cos(kPi * x.x());
  };
  p.coef.reaction = [](double t, const Vec& x, double, const Vec&) {
    return (1.0 + kPi * kPi / 2.0) * std::exp(-t) * std::cos(kPi * x.x());
  };
  p.coef.divergence_field = zero_field(dom.dim());
  p.coef.boundary_reaction = zero_boundary();
  p.coef.exact_solution = [](double t, const Vec& x) {
    return std::exp(-t) * std::cos(kPi * x.x());
  };
  p.assume = Assumptions{};
  p.assume.k_bound = 1.0 + kPi * kPi / 2.0;
  p.assume.c_space = kPi * (1.0 + kPi * kPi / 2.0);
  return p;
}

// u(t,x) = e^{-t} x^2/2 with divergence field g = e^{-t} x/2:
//   dt u + 1/2 u_xx - div g + f = 0 with f = u, and the boundary flux
//   identity <grad u, n> = 2 <g, n> holds at both endpoints.
Preset preset_manufactured_gx(const Interval& dom, double horizon) {
  (void)dom;
  Preset p;
  p.coef.name = "manufactured_gx";
  p.coef.horizon = horizon;
  p.coef.linear = true;
  p.coef.terminal = [horizon](const Vec& x) {
    return std::exp(-horizon) * 0.5 * x.x() * x.x();
  };
  p.coef.reaction = [](double t, const Vec& x, double, const Vec&) {
    return std::exp(-t) * 0.5 * x.x() * x.x();
  };
  p.coef.divergence_field = [](double t, const Vec& x, double, const Vec&) {
    return Vec{std::exp(-t) * 0.5 * x.x()};
  };
  p.coef.boundary_reaction = zero_boundary();
  Coefficients::SeparableG sep;
  sep.time_factor = [](double t) { return std::exp(-t); };
  sep.time_factor_dt = [](double t) { return -std::exp(-t); };
  sep.space_field = [](const Vec& x) { return Vec{0.5 * x.x()}; };
  p.coef.separable_g = sep;
  p.coef.exact_solution = [](double t, const Vec& x) {
    return std::exp(-t) * 0.5 * x.x() * x.x();
  };
  p.assume = Assumptions{};
  p.assume.k_bound = 1.0;
  p.assume.c_space = 1.0;
  return p;
}

// Same solution as manufactured_gx but driven through the boundary term:
// g = 0 and h(t,x) = e^{-t} at both endpoints.
Preset preset_manufactured_h(const Interval& dom, double horizon) {
  Preset p;
  p.coef.name = "manufactured_h";
  p.coef.horizon = horizon;
  p.coef.linear = true;
  p.coef.terminal = [horizon](const Vec& x) {
    return std::exp(-horizon) * 0.5 * x.x() * x.x();
  };
  p.coef.reaction = [](double t, const Vec& x, double, const Vec&) {
    return std::exp(-t) * 0.5 * (x.x() * x.x() - 1.0);
  };
  p.coef.divergence_field = zero_field(dom.dim());
  p.coef.boundary_reaction = [](double t, const Vec&, double) {
    return std::exp(-t);
  };
  p.coef.exact_solution = [](double t, const Vec& x) {
    return std::exp(-t) * 0.5 * x.x() * x.x();
  };
  p.assume = Assumptions{};
  p.assume.k_bound = 1.0;
  p.assume.c_space = 1.0;
  return p;
}

// Nonlinear family with small coupling constants; clamps keep the data
// bounded while staying exactly linear on the solution range.
Preset preset_nonlinear_small_gamma(const Interval& dom, double horizon) {
  Preset p;
  p.coef.name = "nonlinear_small_gamma";
  p.coef.horizon = horizon;
  p.coef.linear = false;
  p.coef.terminal = [](const Vec& x) { return 0.5 * std::cos(kPi * x.x()); };
  p.coef.reaction = [](double t, const Vec& x, double y, const Vec& z) {
    return 0.5 * std::exp(-t) * std::cos(kPi * x.x()) + 0.1 * clamp5(y) +
           0.1 * clamp5(z.size() ? z.x() : 0.0);
  };
  p.coef.divergence_field = [](double t, const Vec& x, double y, const Vec&) {
    return Vec{0.05 * std::exp(-t) * x.x() + 0.1 * std::tanh(y)};
  };
  p.coef.boundary_reaction = [](double, const Vec&, double y) {
    return -0.1 * clamp5(y);
  };
  (void)dom;
  p.assume.alpha = 0.2;
  p.assume.beta = 0.1;
  p.assume.gamma = 0.1;
  p.assume.k_bound = 1.6;
  p.assume.c_space = 2.0;
  p.assume.trace_norm = 1.2;
  return p;
}

}  // namespace

Preset make_preset(const std::string& name, const Interval& dom,
                   double horizon, double const_value) {
  if (name == "constant") return preset_constant(dom, horizon, const_value);
  if (name == "manufactured_g0") return preset_manufactured_g0(dom, horizon);
  if (name == "manufactured_gx") return preset_manufactured_gx(dom, horizon);
  if (name == "manufactured_h") return preset_manufactured_h(dom, horizon);
  if (name == "nonlinear_small_gamma")
    return preset_nonlinear_small_gamma(dom, horizon);
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"constant", "manufactured_g0", "manufactured_gx", "manufactured_h",
          "nonlinear_small_gamma"};
}

// ---------------------------------------------------------------------------

std::string AssumptionCheck::summary() const {
  std::ostringstream os;
  for (const auto& it : items) {
    os << it.condition << ": observed=" << it.observed
       << " declared=" << it.declared << (it.violated ? " VIOLATED" : " ok")
       << '\n';
  }
  return os.str();
}

AssumptionCheck check_assumptions(const Coefficients& coef,
                                  const Assumptions& assume, long probes,
                                  std::uint64_t seed) {
  if (probes <= 0) throw std::invalid_argument("check_assumptions: probes > 0");
  Xoshiro256 eng(stream_seed(seed, "check_assumptions", 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const double ybox = 3.0, zbox = 3.0;
  const double T = coef.horizon;
  const std::size_t dim = 1;  // probe along the first coordinate

  auto rt = [&]() { return T * unif(eng); };
  auto rx = [&]() { return Vec{-1.0 + 2.0 * unif(eng)}; };
  auto ry = [&]() { return ybox * (2.0 * unif(eng) - 1.0); };
  auto rz = [&]() { return Vec(dim, zbox * (2.0 * unif(eng) - 1.0)); };
  // small and order-one separations both matter for Lipschitz quotients
  auto sep = [&]() {
    const double scale = (unif(eng) < 0.5) ? 1e-3 : 1.0;
    return scale * (2.0 * unif(eng) - 1.0);
  };

  double f_onesided = -1e300;   // (H1) quotient for f in y
  double h_onesided = -1e300;   // (H1) quotient for h in y
  double f_growth = 0.0;        // (H2) |f| / (1+|y|+|z|)
  double h_bound = 0.0;         // (H2) |h|
  double f_yz_lip = 0.0;        // (H4) quotient in (y,z)
  double f_x_lip = 0.0;         // (H4) quotient in x
  double h_y_lip = 0.0;         // (H5) quotient in y
  double h_x_lip = 0.0;         // (H5) quotient in x
  double g_yz_lip = 0.0;        // (H6) per-component quotient in (y,z)

  for (long s = 0; s < probes; ++s) {
    const double t = rt();
    const Vec x = rx();
    const double y = ry();
    const Vec z = rz();
    const double dy = sep();
    const double y2 = y + dy;
    Vec z2 = z;
    z2[0] += sep();
    Vec x2 = x;
    x2[0] = std::clamp(x2[0] + sep(), -1.0, 1.0);

    const double f1 = coef.f(t, x, y, z);
    const double h1 = coef.h(t, x, y);

    if (std::abs(dy) > 0.0) {
      const double q =
          (y - y2) * (f1 - coef.f(t, x, y2, z)) / ((y - y2) * (y - y2));
      f_onesided = std::max(f_onesided, q);
      const double qh = (y - y2) * (h1 - coef.h(t, x, y2)) / ((y - y2) * (y - y2));
      h_onesided = std::max(h_onesided, qh);
      h_y_lip = std::max(h_y_lip, std::abs(h1 - coef.h(t, x, y2)) / std::abs(dy));
    }

    f_growth = std::max(f_growth, std::abs(f1) / (1.0 + std::abs(y) + norm(z)));
    h_bound = std::max(h_bound, std::abs(h1));

    const double dyz = std::abs(dy) + norm(z2 - z);
    if (dyz > 0.0) {
      f_yz_lip = std::max(f_yz_lip,
                          std::abs(f1 - coef.f(t, x, y2, z2)) / dyz);
      const Vec g1 = coef.g(t, x, y, z);
      const Vec g2 = coef.g(t, x, y2, z2);
      for (std::size_t i = 0; i < g1.size(); ++i)
        g_yz_lip = std::max(g_yz_lip, std::abs(g1[i] - g2[i]) / dyz);
    }

    const double dx = norm(x2 - x);
    if (dx > 0.0) {
      f_x_lip = std::max(f_x_lip, std::abs(f1 - coef.f(t, x2, y, z)) / dx);
      h_x_lip = std::max(h_x_lip, std::abs(h1 - coef.h(t, x2, y)) / dx);
    }
  }

  const double tol = 1e-9;
  AssumptionCheck out;
  auto push = [&](const std::string& cond, double obs, double dec, bool viol) {
    out.items.push_back({cond, obs, dec, viol});
    out.any_violation = out.any_violation || viol;
  };
  push("(H1) f one-sided <= alpha", f_onesided, assume.alpha,
       f_onesided > assume.alpha + tol);
  push("(H1) h one-sided <= -beta", h_onesided, -assume.beta,
       h_onesided > -assume.beta + tol);
  push("(H2) |f| growth <= K", f_growth, assume.k_bound,
       f_growth > assume.k_bound + tol);
  push("(H2) |h| <= K", h_bound, assume.k_bound, h_bound > assume.k_bound + tol);
  push("(H4) f (y,z)-Lipschitz <= alpha", f_yz_lip, assume.alpha,
       f_yz_lip > assume.alpha + tol);
  push("(H4) f x-Lipschitz <= C", f_x_lip, assume.c_space,
       f_x_lip > assume.c_space + tol);
  push("(H5) h y-Lipschitz <= beta", h_y_lip, assume.beta,
       h_y_lip > assume.beta + tol);
  push("(H5) h x-Lipschitz <= C", h_x_lip, assume.c_space,
       h_x_lip > assume.c_space + tol);
  push("(H6) g (y,z)-Lipschitz <= gamma", g_yz_lip, assume.gamma,
       g_yz_lip > assume.gamma + tol);
  return out;
}

// ---------------------------------------------------------------------------
// Trace norm on the interval.  The maximizer of
//   (v(a)^2 + v(b)^2) / (||v||^2 + ||v'||^2)
// over the P1 space lies in the span of C^{-1} e_first and C^{-1} e_last with
// C the P1 Gram matrix of the H^1 inner product, so the maximum reduces to a
// 2x2 generalized eigenvalue problem.

namespace {

Tridiag h1_gram(int nodes, double hx) {
  Tridiag m(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const bool end = (i == 0 || i == nodes - 1);
    m.diag[i] = (end ? hx / 3.0 : 2.0 * hx / 3.0) + (end ? 1.0 : 2.0) / hx;
    if (i > 0) m.lower[i] = hx / 6.0 - 1.0 / hx;
    if (i + 1 < nodes) m.upper[i] = hx / 6.0 - 1.0 / hx;
  }
  return m;
}

}  // namespace

double trace_quotient(const Interval& dom, const std::vector<double>& nodal) {
  const int nodes = static_cast<int>(nodal.size());
  if (nodes < 2) throw std::invalid_argument("trace_quotient: need >= 2 nodes");
  const double hx = (dom.b() - dom.a()) / (nodes - 1);
  double l2 = 0.0, h1 = 0.0;
  for (int i = 0; i + 1 < nodes; ++i) {
    const double u0 = nodal[i], u1 = nodal[i + 1];
    l2 += hx * (u0 * u0 + u0 * u1 + u1 * u1) / 3.0;
    const double s = (u1 - u0) / hx;
    h1 += hx * s * s;
  }
  const double bnd = nodal.front() * nodal.front() + nodal.back() * nodal.back();
  return std::sqrt(bnd / (l2 + h1));
}

std::optional<double> estimate_trace_norm(const Domain& dom, int nodes) {
  const Interval* iv = as_interval(dom);
  if (iv == nullptr) return std::nullopt;
  if (nodes < 3) throw std::invalid_argument("estimate_trace_norm: nodes >= 3");

  const double hx = (iv->b() - iv->a()) / (nodes - 1);
  const Tridiag gram = h1_gram(nodes, hx);

  std::vector<double> e0(nodes, 0.0), e1(nodes, 0.0);
  e0.front() = 1.0;
  e1.back() = 1.0;
  const std::vector<double> w0 = solve_tridiag(gram, e0);
  const std::vector<double> w1 = solve_tridiag(gram, e1);

  // 2x2 problem: S_ij = e_i^T C^{-1} e_j, largest eigenvalue = ||Tr||^2
  const double s00 = w0.front();
  const double s01 = w1.front();  // = w0.back() by symmetry
  const double s11 = w1.back();
  const double mean = 0.5 * (s00 + s11);
  const double disc = std::sqrt(std::max(0.0, mean * mean - (s00 * s11 - s01 * s01)));
  const double lmax = mean + disc;
  return std::sqrt(lmax);
}

}  // namespace neupde
