#include <doctest.h>

#include <cmath>

#include "neupde/coefficients.hpp"
#include "neupde/lift.hpp"

using namespace neupde;

namespace {

double max_node_error(const std::vector<double>& sol, double lo, double hi,
                      const std::function<double(double)>& exact) {
  const double hx = (hi - lo) / static_cast<double>(sol.size() - 1);
  double err = 0.0;
  for (std::size_t i = 0; i < sol.size(); ++i)
    err = std::max(err, std::abs(sol[i] - exact(lo + i * hx)));
  return err;
}

}  // namespace

TEST_CASE("lift slice: zero-box oracle G'' - G = 1 on (-2,2)") {
  auto g = [](double x) { return x; };
  auto exact = [](double x) { return std::cosh(x) / std::cosh(2.0) - 1.0; };

  SUBCASE("matches the closed form at 2001 nodes") {
    LiftSliceReport rep;
    const auto sol = solve_lift_slice(g, -2.0, 2.0, 2001,
                                      LiftBoundary::zero_box, &rep);
    CHECK(max_node_error(sol, -2.0, 2.0, exact) <= 1e-4);
    CHECK(sol.front() == 0.0);
    CHECK(sol.back() == 0.0);
    CHECK(rep.ok());
    // center value of the closed form
    CHECK(sol[1000] == doctest::Approx(1.0 / std::cosh(2.0) - 1.0).epsilon(1e-5));
  }

  SUBCASE("refinement order is at least 1.8") {
    const double e1 = max_node_error(
        solve_lift_slice(g, -2.0, 2.0, 251, LiftBoundary::zero_box), -2.0, 2.0,
        exact);
    const double e2 = max_node_error(
        solve_lift_slice(g, -2.0, 2.0, 501, LiftBoundary::zero_box), -2.0, 2.0,
        exact);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.8);
  }

  SUBCASE("constant data solves to zero in zero-box mode") {
    const auto sol = solve_lift_slice([](double) { return 3.7; }, -2.0, 2.0,
                                      101, LiftBoundary::zero_box);
    for (double v : sol) CHECK(std::abs(v) <= 1e-13);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(solve_lift_slice(g, -2.0, 2.0, 2, LiftBoundary::zero_box),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_lift_slice(g, 2.0, -2.0, 10, LiftBoundary::zero_box),
                    std::invalid_argument);
  }
}

TEST_CASE("lift slice: natural mode carries the boundary flux") {
  SUBCASE("constant data: G = c sinh(x)/cosh(1) on (-1,1)") {
    const double c = 0.8;
    const auto sol = solve_lift_slice([c](double) { return c; }, -1.0, 1.0,
                                      1001, LiftBoundary::natural);
    auto exact = [c](double x) { return c * std::sinh(x) / std::cosh(1.0); };
    CHECK(max_node_error(sol, -1.0, 1.0, exact) <= 5e-5);
  }

  SUBCASE("g = x/2: G = cosh(x)/(2 sinh 1) - 1/2") {
    const auto sol = solve_lift_slice([](double x) { return 0.5 * x; }, -1.0,
                                      1.0, 1001, LiftBoundary::natural);
    auto exact = [](double x) {
      return std::cosh(x) / (2.0 * std::sinh(1.0)) - 0.5;
    };
    CHECK(max_node_error(sol, -1.0, 1.0, exact) <= 5e-5);
    // flux condition G'(+-1) = g(+-1) = +-1/2, checked by one-sided slopes
    const double hx = 2.0 / 1000.0;
    const double right =
        (3.0 * sol[1000] - 4.0 * sol[999] + sol[998]) / (2.0 * hx);
    CHECK(right == doctest::Approx(0.5).epsilon(2e-3));
  }
}

TEST_CASE("space-time lift of the divergence preset") {
  auto dom = make_interval(-1.0, 1.0);
  const Preset p = make_preset("manufactured_gx", *dom, 1.0);

  SUBCASE("natural mode matches the separable closed form") {
    const LiftField f =
        solve_lift_spacetime(p.coef, *dom, 801, 21, LiftBoundary::natural);
    auto g2 = [](double x) {
      return std::cosh(x) / (2.0 * std::sinh(1.0)) - 0.5;
    };
    double err = 0.0, err_dt = 0.0;
    for (std::size_t it = 0; it < f.t_nodes().size(); ++it) {
      const double a = std::exp(-f.t_nodes()[it]);
      for (std::size_t ix = 0; ix < f.x_nodes().size(); ++ix) {
        const double ex = a * g2(f.x_nodes()[ix]);
        err = std::max(err, std::abs(f.value_node(it, ix) - ex));
        err_dt = std::max(err_dt, std::abs(f.dt_node(it, ix) + ex));
      }
    }
    CHECK(err <= 1e-4);
    CHECK(err_dt <= 1e-4);  // separable: dt G = -G analytically
    for (const auto& rep : f.slice_reports()) CHECK(rep.ok());
  }

  SUBCASE("numeric time differences agree with the separable derivative") {
    Coefficients numeric = p.coef;
    numeric.separable_g.reset();  // force per-slice solves + time differencing
    const LiftField f =
        solve_lift_spacetime(numeric, *dom, 401, 41, LiftBoundary::natural);
    double worst = 0.0;
    for (std::size_t it = 0; it < f.t_nodes().size(); ++it)
      for (std::size_t ix = 0; ix < f.x_nodes().size(); ++ix)
        worst = std::max(worst, std::abs(f.dt_node(it, ix) + f.value_node(it, ix)));
    CHECK(worst <= 5e-4);  // O(dt^2) consistency of the central differences
  }

  SUBCASE("zero data gives the zero field") {
    const Preset z = make_preset("manufactured_g0", *dom, 1.0);
    const LiftField f =
        solve_lift_spacetime(z.coef, *dom, 101, 5, LiftBoundary::natural);
    for (std::size_t it = 0; it < 5; ++it)
      for (std::size_t ix = 0; ix < 101; ++ix)
        CHECK(std::abs(f.value_node(it, ix)) <= 1e-14);
  }

  SUBCASE("zero-box restriction depends on the extension, natural does not") {
    // the zero-box lift picks up the cutoff through its boundary flux on D
    const LiftField narrow =
        solve_lift_spacetime(p.coef, *dom, 801, 5, LiftBoundary::zero_box, 1.0);
    const LiftField wide =
        solve_lift_spacetime(p.coef, *dom, 1201, 5, LiftBoundary::zero_box, 2.0);
    double gap = 0.0;
    for (double x = -1.0; x <= 1.0; x += 0.125) {
      const double a = narrow.eval(0.0, Vec{x}).value;
      const double b = wide.eval(0.0, Vec{x}).value;
      gap = std::max(gap, std::abs(a - b));
    }
    CHECK(gap > 0.01);  // different extensions, genuinely different fields on D
  }
}

TEST_CASE("lift evaluation contract") {
  auto dom = make_interval(-1.0, 1.0);
  const Preset p = make_preset("manufactured_gx", *dom, 1.0);
  const LiftField f =
      solve_lift_spacetime(p.coef, *dom, 201, 11, LiftBoundary::natural);

  SUBCASE("grid nodes reproduce stored values") {
    CHECK(f.eval(f.t_nodes()[3], Vec{f.x_nodes()[10]}).value ==
          doctest::Approx(f.value_node(3, 10)).epsilon(1e-14));
  }

  SUBCASE("midpoint of two nodes is the arithmetic mean") {
    const double xm = 0.5 * (f.x_nodes()[4] + f.x_nodes()[5]);
    const double expect = 0.5 * (f.value_node(0, 4) + f.value_node(0, 5));
    CHECK(f.eval(0.0, Vec{xm}).value == doctest::Approx(expect).epsilon(1e-14));
  }

  SUBCASE("interpolation is Lipschitz with the gradient bound") {
    double max_grad = 0.0, mv = 0.0, md = 0.0;
    f.bounds(&mv, &max_grad, &md);
    const double a = f.eval(0.37, Vec{0.21}).value;
    const double b = f.eval(0.37, Vec{0.29}).value;
    CHECK(std::abs(a - b) / 0.08 <= 1.05 * max_grad);
  }

  SUBCASE("natural mode extends past the endpoints up to the margin") {
    const auto e = f.eval(0.5, Vec{1.1});
    const auto edge = f.eval(0.5, Vec{1.0});
    CHECK(e.value == doctest::Approx(edge.value + 0.1 * edge.grad.x()).epsilon(1e-12));
    CHECK_THROWS_AS(f.eval(0.5, Vec{3.0}), std::out_of_range);
    CHECK_THROWS_AS(f.eval(2.5, Vec{0.0}), std::out_of_range);
  }
}
