#include <doctest.h>

#include <cmath>

#include "neupde/coefficients.hpp"
#include "neupde/rng.hpp"

using namespace neupde;

TEST_CASE("linear presets ignore (y,z) arguments") {
  auto dom = make_interval(-1.0, 1.0);
  for (const std::string name :
       {"constant", "manufactured_g0", "manufactured_gx", "manufactured_h"}) {
    const Preset p = make_preset(name, *dom, 1.0);
    REQUIRE(p.coef.linear);
    Xoshiro256 eng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
      const double t = 0.5 * (u(eng) + 3.0) / 3.0;
      const Vec x{0.25};
      const double f0 = p.coef.f(t, x, 0.0, Vec{0.0});
      const double f1 = p.coef.f(t, x, u(eng), Vec{u(eng)});
      CHECK(f0 == f1);
      CHECK(p.coef.g(t, x, 0.0, Vec{0.0}).x() == p.coef.g(t, x, u(eng), Vec{u(eng)}).x());
      CHECK(p.coef.h(t, x, 0.0) == p.coef.h(t, x, u(eng)));
    }
  }
}

TEST_CASE("manufactured presets satisfy their closed forms") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("gx flux identity at both endpoints") {
    const Preset p = make_preset("manufactured_gx", *dom, 1.0);
    // <grad u, n> = 2<g, n> at x = +-1 (h = 0)
    for (double t : {0.0, 0.3, 1.0}) {
      const double gb = p.coef.g(t, Vec{1.0}, 0, Vec{0.0}).x();
      CHECK(-std::exp(-t) == doctest::Approx(2.0 * gb * -1.0));
    }
  }

  SUBCASE("exact solutions stored") {
    for (const std::string name : {"manufactured_g0", "manufactured_gx",
                                   "manufactured_h"}) {
      const Preset p = make_preset(name, *dom, 1.0);
      REQUIRE(p.coef.exact_solution.has_value());
      CHECK((*p.coef.exact_solution)(1.0, Vec{0.5}) ==
            doctest::Approx(p.coef.terminal(Vec{0.5})));
    }
  }

  SUBCASE("unknown preset rejected") {
    CHECK_THROWS_AS(make_preset("nope", *dom, 1.0), std::invalid_argument);
  }
}

TEST_CASE("check_assumptions refutes and accepts") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("f = -y satisfies (H1) with alpha = 0") {
    Coefficients c;
    c.name = "probe";
    c.horizon = 1.0;
    c.linear = false;
    c.terminal = [](const Vec&) { return 0.0; };
    c.reaction = [](double, const Vec&, double y, const Vec&) { return -y; };
    c.divergence_field = [](double, const Vec&, double, const Vec&) {
      return Vec{0.0};
    };
    c.boundary_reaction = [](double, const Vec&, double y) { return -0.1 * y; };
    Assumptions a;
    a.alpha = 0.0;
    a.beta = 0.1;
    a.gamma = 0.0;
    a.k_bound = 10.0;
    a.c_space = 1.0;
    const AssumptionCheck rep = check_assumptions(c, a, 5000, 3);
    CHECK_FALSE(rep.items[0].violated);       // f one-sided
    CHECK(rep.items[0].observed <= 0.0);
    CHECK_FALSE(rep.items[1].violated);       // h one-sided, equality at -beta
    CHECK(rep.items[1].observed == doctest::Approx(-0.1));
  }

  SUBCASE("understated gamma is flagged") {
    Coefficients c;
    c.name = "probe";
    c.horizon = 1.0;
    c.linear = false;
    c.terminal = [](const Vec&) { return 0.0; };
    c.reaction = [](double, const Vec&, double, const Vec&) { return 0.0; };
    c.divergence_field = [](double, const Vec&, double y, const Vec&) {
      return Vec{0.1 * std::sin(y)};
    };
    c.boundary_reaction = [](double, const Vec&, double) { return 0.0; };
    Assumptions a;
    a.gamma = 0.05;  // true constant is 0.1
    a.k_bound = 10.0;
    a.c_space = 1.0;
    const AssumptionCheck rep = check_assumptions(c, a, 20000, 5);
    bool g_flagged = false;
    for (const auto& it : rep.items)
      if (it.condition.find("(H6)") != std::string::npos) {
        g_flagged = it.violated;
        CHECK(it.observed > 0.09);
      }
    CHECK(g_flagged);
  }

  SUBCASE("deterministic under a fixed seed") {
    const Preset p = make_preset("nonlinear_small_gamma", *dom, 1.0);
    const AssumptionCheck a = check_assumptions(p.coef, p.assume, 4000, 17);
    const AssumptionCheck b = check_assumptions(p.coef, p.assume, 4000, 17);
    CHECK(a.summary() == b.summary());
    CHECK_FALSE(a.any_violation);  // declared constants hold for the preset
  }
}

TEST_CASE("trace norm estimate on the interval") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("constant function has quotient exactly 1") {
    const std::vector<double> ones(11, 1.0);
    CHECK(trace_quotient(*dom, ones) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("estimate dominates the constant-function quotient") {
    const auto est = estimate_trace_norm(*dom, 101);
    REQUIRE(est.has_value());
    CHECK(*est >= 1.0);
  }

  SUBCASE("refinement converges to the closed form sqrt(coth(1))") {
    const double exact = std::sqrt(std::cosh(1.0) / std::sinh(1.0));
    const double coarse = *estimate_trace_norm(*dom, 501);
    const double fine = *estimate_trace_norm(*dom, 1001);
    CHECK(std::abs(fine - exact) <= 2e-3);
    CHECK(std::abs(fine - coarse) / fine < 0.01);
    // nested refinement can only enlarge the trial space
    CHECK(fine >= coarse - 1e-12);
  }

  SUBCASE("unsupported domains report nullopt") {
    auto ball = make_ball(Vec{0.0, 0.0}, 1.0);
    CHECK_FALSE(estimate_trace_norm(*ball, 50).has_value());
  }
}
