#include "neupde/fd_solver.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "neupde/tridiag.hpp"

namespace neupde {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)
constexpr double kPi = std::numbers::pi;

struct Assembly {
  double hx;
  std::vector<double> xs;
  Tridiag mass;
  Tridiag half_stiff;
};

Assembly assemble(const Interval& dom, int nx) {
  Assembly a{0.0, {}, Tridiag(static_cast<std::size_t>(nx)),
             Tridiag(static_cast<std::size_t>(nx))};
  a.hx = (dom.b() - dom.a()) / static_cast<double>(nx - 1);
  a.xs = linspace(dom.a(), dom.b(), static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) {
    const bool end = (i == 0 || i == nx - 1);
    a.mass.diag[i] = end ? a.hx / 3.0 : 2.0 * a.hx / 3.0;
    a.half_stiff.diag[i] = 0.5 * (end ? 1.0 : 2.0) / a.hx;
    if (i > 0) {
      a.mass.lower[i] = a.hx / 6.0;
      a.half_stiff.lower[i] = -0.5 / a.hx;
    }
    if (i + 1 < nx) {
      a.mass.upper[i] = a.hx / 6.0;
      a.half_stiff.upper[i] = -0.5 / a.hx;
    }
  }
  return a;
}

// load vector at PDE time t:
//   l_i = integral( g phi_i' ) + integral( f phi_i ) + h-term/2 at the ends
std::vector<double> load_vector(const Assembly& a, const Interval& dom,
                                const Coefficients& coef, double t) {
  const std::size_t nx = a.xs.size();
  std::vector<double> l(nx, 0.0);
  const Vec zero_z(1, 0.0);
  for (std::size_t c = 0; c + 1 < nx; ++c) {
    const double xc = 0.5 * (a.xs[c] + a.xs[c + 1]);
    for (int q = 0; q < 2; ++q) {
      const double xq = xc + (q == 0 ? -0.5 : 0.5) * a.hx * kGauss;
      const double w = 0.5 * a.hx;  // Gauss weight on the cell
      const Vec xv{xq};
      const double fv = coef.f(t, xv, 0.0, zero_z);
      const double gv = coef.g(t, xv, 0.0, zero_z).x();
      const double lam = (xq - a.xs[c]) / a.hx;  // hat weights on the cell
      l[c] += w * fv * (1.0 - lam);
      l[c + 1] += w * fv * lam;
      l[c] += w * gv * (-1.0 / a.hx);
      l[c + 1] += w * gv * (1.0 / a.hx);
    }
  }
  l[0] += 0.5 * coef.h(t, Vec{dom.a()}, 0.0);
  l[nx - 1] += 0.5 * coef.h(t, Vec{dom.b()}, 0.0);
  return l;
}

}  // namespace

GridFunction solve_linear_fd(const Interval& dom, const Coefficients& coef,
                             const FdConfig& cfg) {
  if (!coef.linear)
    throw std::invalid_argument("solve_linear_fd: linear coefficients required");
  if (cfg.x_nodes < 3 || cfg.t_steps < 1)
    throw std::invalid_argument("solve_linear_fd: grid too small");
  const double T = coef.horizon;
  const double dtau = T / static_cast<double>(cfg.t_steps);
  const Assembly a = assemble(dom, cfg.x_nodes);
  if (cfg.theta < 0.5 && dtau > a.hx * a.hx)
    throw std::invalid_argument(
        "solve_linear_fd: theta < 0.5 requires dt <= dx^2");

  const std::size_t nx = a.xs.size();
  const std::size_t nt = static_cast<std::size_t>(cfg.t_steps) + 1;

  Tridiag lhs(nx), rhs_m(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    lhs.diag[i] = a.mass.diag[i] + cfg.theta * dtau * a.half_stiff.diag[i];
    lhs.lower[i] = a.mass.lower[i] + cfg.theta * dtau * a.half_stiff.lower[i];
    lhs.upper[i] = a.mass.upper[i] + cfg.theta * dtau * a.half_stiff.upper[i];
    rhs_m.diag[i] = a.mass.diag[i] - (1.0 - cfg.theta) * dtau * a.half_stiff.diag[i];
    rhs_m.lower[i] = a.mass.lower[i] - (1.0 - cfg.theta) * dtau * a.half_stiff.lower[i];
    rhs_m.upper[i] = a.mass.upper[i] - (1.0 - cfg.theta) * dtau * a.half_stiff.upper[i];
  }

  GridFunction out;
  out.t_nodes = linspace(0.0, T, nt);
  out.x_nodes = a.xs;
  out.values.assign(nt * nx, 0.0);
  out.se.assign(nt * nx, 0.0);
  out.meta.solver = "fd";

  std::vector<double> v(nx);
  for (std::size_t i = 0; i < nx; ++i) v[i] = coef.terminal(Vec{a.xs[i]});
  for (std::size_t i = 0; i < nx; ++i) out.values[(nt - 1) * nx + i] = v[i];

  std::vector<double> load_old = load_vector(a, dom, coef, T);
  for (int m = 0; m < cfg.t_steps; ++m) {
    const double t_new = T - (m + 1) * dtau;
    const std::vector<double> load_new = load_vector(a, dom, coef, t_new);
    std::vector<double> rhs = rhs_m.multiply(v);
    for (std::size_t i = 0; i < nx; ++i)
      rhs[i] += dtau * (cfg.theta * load_new[i] + (1.0 - cfg.theta) * load_old[i]);
    v = solve_tridiag(lhs, rhs);
    const std::size_t it = nt - 2 - static_cast<std::size_t>(m);
    for (std::size_t i = 0; i < nx; ++i) out.values[it * nx + i] = v[i];
    load_old = load_new;
  }
  out.recompute_gradient();
  return out;
}

// ---------------------------------------------------------------------------

Coefficients freeze_coefficients(const Coefficients& coef,
                                 const GridFunction& u) {
  Coefficients frozen;
  frozen.name = coef.name + "#frozen";
  frozen.horizon = coef.horizon;
  frozen.linear = true;
  frozen.terminal = coef.terminal;
  const Coefficients base = coef;  // keep the evaluators alive by value
  const GridFunction grid = u;
  frozen.reaction = [base, grid](double t, const Vec& x, double, const Vec&) {
    const double y = grid.value_at(t, x.x());
    const Vec z{grid.gradient_at(t, x.x())};
    return base.reaction(t, x, y, z);
  };
  frozen.divergence_field = [base, grid](double t, const Vec& x, double,
                                         const Vec&) {
    const double y = grid.value_at(t, x.x());
    const Vec z{grid.gradient_at(t, x.x())};
    return base.divergence_field(t, x, y, z);
  };
  frozen.boundary_reaction = [base, grid](double t, const Vec& x, double) {
    return base.boundary_reaction(t, x, grid.value_at(t, x.x()));
  };
  return frozen;
}

double weighted_h1_distance(const GridFunction& a, const GridFunction& b,
                            double theta) {
  if (a.nt() != b.nt() || a.nx() != b.nx())
    throw std::invalid_argument("weighted_h1_distance: grid mismatch");
  const std::size_t nt = a.nt(), nx = a.nx();
  const double hx = (a.x_nodes.back() - a.x_nodes.front()) /
                    static_cast<double>(nx - 1);
  double acc = 0.0;
  for (std::size_t it = 0; it < nt; ++it) {
    double slice = 0.0;
    for (std::size_t c = 0; c + 1 < nx; ++c) {
      const double d0 = a.values[it * nx + c] - b.values[it * nx + c];
      const double d1 = a.values[it * nx + c + 1] - b.values[it * nx + c + 1];
      slice += hx * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;  // integral of (P1)^2
      const double s = (d1 - d0) / hx;
      slice += hx * s * s;
    }
    const double wt =
        (it == 0 || it + 1 == nt)
            ? 0.5 * (a.t_nodes[std::min(it + 1, nt - 1)] -
                     a.t_nodes[it == 0 ? 0 : it - 1])
            : 0.5 * (a.t_nodes[it + 1] - a.t_nodes[it - 1]);
    acc += wt * std::exp(theta * a.t_nodes[it]) * slice;
  }
  return std::sqrt(acc);
}

PicardResult picard_solve_fd(const Interval& dom, const Coefficients& coef,
                             const Assumptions& assume, const FdConfig& cfg,
                             const PicardOptions& opts) {
  if (!assume.gamma_small())
    throw std::invalid_argument("picard_solve_fd: 2*sqrt(2)*gamma >= 1");
  if (!assume.beta_trace_ok())
    throw std::invalid_argument("picard_solve_fd: beta*Tr^2 >= 1");
  const ContractionConstants cc = contraction_constants(assume);
  if (!cc.analytic.feasible)
    throw std::invalid_argument("picard_solve_fd: analytic route infeasible: " +
                                cc.analytic.binding);
  const double theta_w = cc.analytic.theta;

  PicardResult res;
  // u^0 = 0 on the solver grid
  GridFunction cur;
  cur.t_nodes = linspace(0.0, coef.horizon, static_cast<std::size_t>(cfg.t_steps) + 1);
  cur.x_nodes = linspace(dom.a(), dom.b(), static_cast<std::size_t>(cfg.x_nodes));
  cur.values.assign(cur.nt() * cur.nx(), 0.0);
  cur.gradient.assign(cur.nt() * cur.nx(), 0.0);
  cur.se.assign(cur.nt() * cur.nx(), 0.0);

  double prev_d = -1.0;
  int rising = 0;
  for (int k = 0; k < opts.max_iter; ++k) {
    const Coefficients frozen = freeze_coefficients(coef, cur);
    GridFunction next = solve_linear_fd(dom, frozen, cfg);
    const double d = weighted_h1_distance(next, cur, theta_w);
    PicardRecord rec;
    rec.k = k;
    rec.distance = d;
    if (k >= 1 && prev_d > 0.0) {
      rec.ratio = d / prev_d;
      if (rec.ratio >= 1.0) {
        if (++rising >= 2) res.divergence_alarm = true;
      } else {
        rising = 0;
      }
    }
    res.history.push_back(rec);
    cur = std::move(next);
    res.iterations = k + 1;
    if (d < opts.tol) {
      res.converged = true;
      break;
    }
    if (res.divergence_alarm) break;
    prev_d = d;
  }
  res.u = std::move(cur);
  return res;
}

// ---------------------------------------------------------------------------

std::vector<TestFunction> default_test_bank(const Interval& dom) {
  const double A = dom.a(), B = dom.b();
  const double scale = 2.0 / (B - A);
  auto xi = [A, B, scale](double x) { return scale * (x - 0.5 * (A + B)); };

  struct TimePart {
    std::string name;
    std::function<double(double)> v, dv;
  };
  struct SpacePart {
    std::string name;
    std::function<double(double)> v, dv;  // in xi, chain rule applied by caller
  };
  const std::vector<TimePart> times = {
      {"1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"t", [](double t) { return t; }, [](double) { return 1.0; }},
      {"exp(-t)", [](double t) { return std::exp(-t); },
       [](double t) { return -std::exp(-t); }},
  };
  const std::vector<SpacePart> spaces = {
      {"1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"xi", [](double s) { return s; }, [](double) { return 1.0; }},
      {"xi^2", [](double s) { return s * s; }, [](double s) { return 2.0 * s; }},
      {"cos(pi xi/2)", [](double s) { return std::cos(0.5 * kPi * s); },
       [](double s) { return -0.5 * kPi * std::sin(0.5 * kPi * s); }},
  };

  std::vector<TestFunction> bank;
  for (const auto& tp : times) {
    for (const auto& sp : spaces) {
      TestFunction f;
      f.name = tp.name + " * " + sp.name;
      f.phi = [tp, sp, xi](double t, double x) { return tp.v(t) * sp.v(xi(x)); };
      f.dphi_dt = [tp, sp, xi](double t, double x) {
        return tp.dv(t) * sp.v(xi(x));
      };
      f.dphi_dx = [tp, sp, xi, scale](double t, double x) {
        return tp.v(t) * sp.dv(xi(x)) * scale;
      };
      bank.push_back(std::move(f));
    }
  }
  return bank;
}

ResidualReport weak_residual(const GridFunction& u, const Coefficients& coef,
                             const Interval& dom,
                             const std::vector<TestFunction>& bank) {
  const std::size_t nt = u.nt(), nx = u.nx();
  const double hx = (u.x_nodes.back() - u.x_nodes.front()) /
                    static_cast<double>(nx - 1);
  ResidualReport rep;

  for (const auto& tf : bank) {
    // per-time-slice integrands, then trapezoid in t
    std::vector<double> u_dphi(nt, 0.0), energy(nt, 0.0), g_term(nt, 0.0),
        f_term(nt, 0.0), h_term(nt, 0.0);
    for (std::size_t it = 0; it < nt; ++it) {
      const double t = u.t_nodes[it];
      double i_udpt = 0.0, i_energy = 0.0, i_g = 0.0, i_f = 0.0;
      for (std::size_t c = 0; c + 1 < nx; ++c) {
        const double x0 = u.x_nodes[c], x1 = u.x_nodes[c + 1];
        const double v0 = u.values[it * nx + c], v1 = u.values[it * nx + c + 1];
        const double slope = (v1 - v0) / hx;
        const double xc = 0.5 * (x0 + x1);
        for (int q = 0; q < 2; ++q) {
          const double xq = xc + (q == 0 ? -0.5 : 0.5) * hx * kGauss;
          const double w = 0.5 * hx;
          const double lam = (xq - x0) / hx;
          const double uq = (1.0 - lam) * v0 + lam * v1;
          const Vec xv{xq};
          const Vec zv{slope};
          i_udpt += w * uq * tf.dphi_dt(t, xq);
          i_energy += w * 0.5 * slope * tf.dphi_dx(t, xq);
          i_g += w * coef.g(t, xv, uq, zv).x() * tf.dphi_dx(t, xq);
          i_f += w * coef.f(t, xv, uq, zv) * tf.phi(t, xq);
        }
      }
      u_dphi[it] = i_udpt;
      energy[it] = i_energy;
      g_term[it] = i_g;
      f_term[it] = i_f;
      const double ua = u.values[it * nx + 0];
      const double ub = u.values[it * nx + nx - 1];
      h_term[it] = coef.h(t, Vec{dom.a()}, ua) * tf.phi(t, dom.a()) +
                   coef.h(t, Vec{dom.b()}, ub) * tf.phi(t, dom.b());
    }

    auto trapz = [&](const std::vector<double>& y) {
      double s = 0.0;
      for (std::size_t it = 0; it + 1 < nt; ++it)
        s += 0.5 * (u.t_nodes[it + 1] - u.t_nodes[it]) * (y[it] + y[it + 1]);
      return s;
    };

    // terminal/initial pairings (u_T, phi_T) and (u_0, phi_0)
    auto slice_pairing = [&](std::size_t it) {
      const double t = u.t_nodes[it];
      double s = 0.0;
      for (std::size_t c = 0; c + 1 < nx; ++c) {
        const double x0 = u.x_nodes[c], x1 = u.x_nodes[c + 1];
        const double v0 = u.values[it * nx + c], v1 = u.values[it * nx + c + 1];
        const double xc = 0.5 * (x0 + x1);
        for (int q = 0; q < 2; ++q) {
          const double xq = xc + (q == 0 ? -0.5 : 0.5) * hx * kGauss;
          const double lam = (xq - x0) / hx;
          s += 0.5 * hx * ((1.0 - lam) * v0 + lam * v1) * tf.phi(t, xq);
        }
      }
      return s;
    };

    const double lhs = slice_pairing(nt - 1) - slice_pairing(0) - trapz(u_dphi);
    const double rhs =
        trapz(energy) - trapz(g_term) - trapz(f_term) - 0.5 * trapz(h_term);
    const double r = std::abs(lhs - rhs);
    rep.per_test.emplace_back(tf.name, r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

}  // namespace neupde
