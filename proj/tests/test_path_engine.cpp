#include <doctest.h>

#include <cmath>

#include "neupde/domain.hpp"
#include "neupde/path_engine.hpp"
#include "neupde/stats.hpp"

using namespace neupde;

namespace {

// pre-scaled increments: draw k yields vals[k] / sqrt(h), so the Brownian
// increment of step k is exactly vals[k]
struct ScriptedNoise {
  std::vector<double> vals;
  double inv_sqrt_h = 1.0;
  std::size_t i = 0;
  Vec draw(std::size_t n) {
    Vec v(n, 0.0);
    v[0] = vals.at(i++) * inv_sqrt_h;
    return v;
  }
};

const FieldFn kUnitField = [](double, const Vec& x) { return Vec(x.size(), 1.0); };

}  // namespace

TEST_CASE("penalized scheme: deterministic limits") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("interior start with zero noise stays put") {
    ZeroNoise zn;
    const PathBundle b =
        simulate_penalized_with(*dom, DriftFn{}, 50, Vec{0.25}, 0.0, 1.0, 1e-2, zn);
    for (const Vec& x : b.states) CHECK(x.x() == doctest::Approx(0.25));
    CHECK(b.local_time.empty());
    CHECK(b.penal.size() == b.steps());
  }

  SUBCASE("exterior start relaxes like the penalization flow") {
    // xdot = -n * 2 (x - 1) from x(0) = 1.5 has x(t) = 1 + 0.5 exp(-20 t)
    ZeroNoise zn;
    const double dt = 1e-3;
    const PathBundle b =
        simulate_penalized_with(*dom, DriftFn{}, 10, Vec{1.5}, 0.0, 1.0, dt, zn);
    double worst = 0.0;
    for (std::size_t k = 0; k < b.states.size(); ++k) {
      const double exact = 1.0 + 0.5 * std::exp(-20.0 * b.t[k]);
      worst = std::max(worst, std::abs(b.states[k].x() - exact));
      if (k > 0) CHECK(b.states[k].x() <= b.states[k - 1].x() + 1e-15);
    }
    CHECK(worst <= 5e-3);  // forward-Euler error at n dt = 0.01
    CHECK(b.states.back().x() == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("recorded increments are -n delta(x) dt on the explicit branch") {
    GaussNoise noise(123);
    const PathBundle b = simulate_penalized_with(*dom, DriftFn{}, 8, Vec{0.9},
                                                 0.0, 0.5, 1e-2, noise);
    const double h = 0.5 / static_cast<double>(b.steps());
    for (std::size_t k = 0; k < b.steps(); ++k) {
      const Vec expect = (-8.0 * h) * dom->penal_delta(b.states[k]);
      CHECK(b.penal[k].x() == doctest::Approx(expect.x()).epsilon(1e-14));
    }
  }

  SUBCASE("stiff branch uses the exact flow and stays stable") {
    ZeroNoise zn;
    const PathBundle b = simulate_penalized_with(*dom, DriftFn{}, 4000,
                                                 Vec{1.5}, 0.0, 0.1, 1e-3, zn);
    // n dt = 4 > 0.5: exact flow contracts toward the projection monotonically
    for (std::size_t k = 1; k < b.states.size(); ++k) {
      CHECK(b.states[k].x() >= 1.0 - 1e-12);
      CHECK(b.states[k].x() <= b.states[k - 1].x() + 1e-15);
    }
  }

  SUBCASE("argument validation") {
    GaussNoise noise(1);
    CHECK_THROWS_AS(simulate_penalized_with(*dom, DriftFn{}, 0, Vec{0.0}, 0.0,
                                            1.0, 1e-2, noise),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_penalized_with(*dom, DriftFn{}, 10, Vec{0.0}, 0.0,
                                            1.0, -1e-2, noise),
                    std::invalid_argument);
  }
}

TEST_CASE("reflected scheme: projection and local time") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("single-step overshoot projects with the pushed distance") {
    ScriptedNoise sn{{0.3}, 1.0};  // one step of size h = 1
    const PathBundle b =
        simulate_reflected_with(*dom, DriftFn{}, Vec{0.9}, 0.0, 1.0, 1.0, sn);
    REQUIRE(b.steps() == 1);
    CHECK(b.states[1].x() == doctest::Approx(1.0));
    CHECK(b.local_time[0] == doctest::Approx(0.2));
    CHECK(b.normals[0].x() == doctest::Approx(-1.0));
    CHECK(b.proposals[0].x() == doctest::Approx(1.2));
  }

  SUBCASE("states never leave the closure; dl only at contact") {
    const PathBundle b =
        simulate_reflected(*dom, DriftFn{}, Vec{0.0}, 0.0, 1.0, 1e-3, 77);
    for (const Vec& x : b.states) CHECK(dom->contains(x));
    for (std::size_t k = 0; k < b.steps(); ++k) {
      CHECK(b.local_time[k] >= 0.0);
      if (b.local_time[k] > 0.0)
        CHECK(std::abs(dom->interior_fn(b.states[k + 1])) <= 1e-12);
    }
  }

  SUBCASE("fixed stream reproduces the bundle") {
    const PathBundle a =
        simulate_reflected(*dom, DriftFn{}, Vec{0.3}, 0.0, 1.0, 1e-3, 2024);
    const PathBundle b =
        simulate_reflected(*dom, DriftFn{}, Vec{0.3}, 0.0, 1.0, 1e-3, 2024);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k)
      CHECK(a.states[k].x() == b.states[k].x());
  }

  SUBCASE("x0 outside the closure is rejected") {
    GaussNoise noise(5);
    CHECK_THROWS_AS(simulate_reflected_with(*dom, DriftFn{}, Vec{1.5}, 0.0, 1.0,
                                            1e-2, noise),
                    std::invalid_argument);
  }

  SUBCASE("Brownian increments have the right quadratic scale") {
    double acc = 0.0;
    const int paths = 200;
    for (int p = 0; p < paths; ++p) {
      const PathBundle b = simulate_reflected(*dom, DriftFn{}, Vec{0.0}, 0.0,
                                              1.0, 1e-3, 1000 + p);
      double qv = 0.0;
      for (const Vec& db : b.brownian) qv += norm2(db);
      acc += qv;  // dim * horizon = 1
    }
    CHECK(acc / paths >= 0.9);
    CHECK(acc / paths <= 1.1);
  }

  SUBCASE("interior start with a tiny horizon rarely touches the boundary") {
    int touched = 0;
    for (int p = 0; p < 200; ++p) {
      const PathBundle b = simulate_reflected(*dom, DriftFn{}, Vec{0.0}, 0.0,
                                              0.01, 1e-3, 500 + p);
      if (b.local_time_total() > 0.0) ++touched;
    }
    CHECK(touched == 0);  // reaching distance 1 in time 0.01 is astronomically rare
  }
}

TEST_CASE("discrete stochastic integrals") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("forward integral of the unit field telescopes to B_T - B_0") {
    const PathBundle b =
        simulate_reflected(*dom, DriftFn{}, Vec{0.2}, 0.0, 1.0, 1e-3, 31);
    double bsum = 0.0;
    for (const Vec& db : b.brownian) bsum += db.x();
    CHECK(forward_integral(kUnitField, b) == doctest::Approx(bsum).epsilon(1e-13));
    const FieldFn zero = [](double, const Vec& x) { return Vec(x.size(), 0.0); };
    CHECK(forward_integral(zero, b) == 0.0);
  }

  SUBCASE("backward integral on an interior-only path is -(B_T - B_0)") {
    ScriptedNoise sn{{0.1, -0.2, 0.15, -0.05}, 2.0};  // h = 1/4
    const PathBundle b =
        simulate_reflected_with(*dom, DriftFn{}, Vec{0.0}, 0.0, 1.0, 0.25, sn);
    CHECK(b.local_time_total() == 0.0);
    double bsum = 0.0;
    for (const Vec& db : b.brownian) bsum += db.x();
    CHECK(backward_integral(kUnitField, b) == doctest::Approx(-bsum).epsilon(1e-13));
  }

  SUBCASE("backward and star reject penalized bundles") {
    const PathBundle p =
        simulate_penalized(*dom, DriftFn{}, 16, Vec{0.0}, 0.0, 0.1, 1e-2, 3);
    CHECK_THROWS_AS(backward_integral(kUnitField, p), std::invalid_argument);
    CHECK_THROWS_AS(star_integral(kUnitField, p), std::invalid_argument);
  }

  SUBCASE("backward integral of a constant has zero ensemble mean") {
    // zero-mean property of the time-reversed driver under uniform starts
    std::vector<ChunkSums> sums(1);
    Xoshiro256 eng(404);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int p = 0; p < 2000; ++p) {
      const PathBundle b = simulate_reflected(*dom, DriftFn{}, Vec{unif(eng)},
                                              0.0, 1.0, 2e-3, 9000 + p);
      sums[0].add(backward_integral(kUnitField, b));
    }
    const MeanSe ms = combine_chunks(sums);
    CHECK(std::abs(ms.mean) <= 3.0 * ms.se);
  }

  SUBCASE("star integral of constant fields vanishes identically") {
    for (int p = 0; p < 50; ++p) {
      const PathBundle b = simulate_reflected(*dom, DriftFn{}, Vec{0.8}, 0.0,
                                              1.0, 1e-3, 600 + p);
      const FieldFn c = [](double, const Vec& x) { return Vec(x.size(), 2.5); };
      CHECK(std::abs(star_integral(c, b)) <= 1e-12);
    }
  }

  SUBCASE("divergence identity: mean star of g(x) = x is -T") {
    const FieldFn g = [](double, const Vec& x) { return x; };
    const StarCheck chk = star_check(*dom, g, 1.0, 1e-3, 20000, 112);
    CHECK(chk.max_constant_star <= 1e-12);
    CHECK(chk.star.se <= 0.02);
    CHECK(std::abs(chk.star.mean + 1.0) <= 3.0 * chk.star.se);
  }

  SUBCASE("divergence identity: odd divergence integrates to zero") {
    // g = x^2 has div g = 2x with zero mean under the uniform start
    const FieldFn g = [](double, const Vec& x) { return Vec{x.x() * x.x()}; };
    const StarCheck chk = star_check(*dom, g, 1.0, 1e-3, 20000, 113);
    CHECK(std::abs(chk.star.mean) <= 3.0 * chk.star.se + 1e-3);
  }
}

TEST_CASE("forward-backward decomposition checks") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("realized quadratic variation of the coordinate martingale") {
    // <M>_t for u(x) = x is t: sum of squared Brownian increments
    std::vector<ChunkSums> sums(1);
    for (int p = 0; p < 300; ++p) {
      const PathBundle b = simulate_reflected(*dom, DriftFn{}, Vec{0.0}, 0.0,
                                              1.0, 1e-3, 7000 + p);
      double qv = 0.0;
      for (const Vec& db : b.brownian) qv += norm2(db);
      sums[0].add(qv);
    }
    const MeanSe ms = combine_chunks(sums);
    CHECK(std::abs(ms.mean - 1.0) <= 0.01);
  }

  SUBCASE("zero-energy combination for smooth F, boundary flux included") {
    // F(X_T) - F(X_0) - 1/2 fwd(F') + 1/2 bwd(F') has zero mean and its
    // pathwise size shrinks with the step
    auto combo_rms = [&](double dt, std::uint64_t seed, double* mean_out,
                         double* se_out) {
      const FieldFn grad = [](double, const Vec& x) { return x; };  // F = x^2/2
      auto F = [](double x) { return 0.5 * x * x; };
      std::vector<ChunkSums> sums(1), sq(1);
      Xoshiro256 eng(seed);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (int p = 0; p < 1500; ++p) {
        const PathBundle b = simulate_reflected(
            *dom, DriftFn{}, Vec{unif(eng)}, 0.0, 1.0, dt,
            stream_seed(seed, "lz", static_cast<std::uint64_t>(p)));
        const double c = F(b.states.back().x()) - F(b.states.front().x()) -
                         0.5 * forward_integral(grad, b) +
                         0.5 * backward_integral(grad, b);
        sums[0].add(c);
        sq[0].add(c * c);
      }
      const MeanSe m = combine_chunks(sums);
      *mean_out = m.mean;
      *se_out = m.se;
      return std::sqrt(combine_chunks(sq).mean);
    };
    double mean1 = 0.0, se1 = 0.0, mean2 = 0.0, se2 = 0.0;
    const double rms_coarse = combo_rms(4e-3, 21, &mean1, &se1);
    const double rms_fine = combo_rms(1e-3, 22, &mean2, &se2);
    // the defect is O(sqrt(dt)): small at the fine step, shrinking with dt
    CHECK(std::abs(mean2) <= 3.0 * se2 + 5e-3);
    CHECK(std::abs(mean2) <= std::abs(mean1) + 3.0 * (se1 + se2));
    CHECK(rms_fine < rms_coarse);
  }

  SUBCASE("pathwise decomposition of a smooth space-time function") {
    // G(t, X_t) - G(s, X_s) = int dt(G) + fwd(grad G) + int dG/dn dL + 1/2 int Lap G,
    // and star(grad G) = -int Lap G, so the combination below has zero mean.
    auto G = [](double t, double x) { return std::exp(-t) * std::sin(x); };
    const FieldFn gradG = [](double t, const Vec& x) {
      return Vec{std::exp(-t) * std::cos(x.x())};
    };
    std::vector<ChunkSums> sums(1);
    Xoshiro256 eng(888);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int p = 0; p < 1200; ++p) {
      const PathBundle b = simulate_reflected(*dom, DriftFn{}, Vec{unif(eng)},
                                              0.0, 1.0, 1e-3, 40000 + p);
      double dt_term = 0.0, dl_term = 0.0;
      for (std::size_t k = 0; k < b.steps(); ++k) {
        dt_term += -G(b.t[k], b.states[k].x()) * (b.t[k + 1] - b.t[k]);
        if (b.local_time[k] > 0.0)
          dl_term += dot(gradG(b.t[k + 1], b.states[k + 1]), b.normals[k]) *
                     b.local_time[k];
      }
      const double combo = G(b.t.back(), b.states.back().x()) -
                           G(0.0, b.states.front().x()) - dt_term -
                           forward_integral(gradG, b) - dl_term +
                           0.5 * star_integral(gradG, b);
      sums[0].add(combo);
    }
    const MeanSe ms = combine_chunks(sums);
    CHECK(std::abs(ms.mean) <= 3.0 * ms.se + 2e-3);
  }
}

TEST_CASE("coupled simulation under common random numbers") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("zero noise from the interior keeps both paths identical") {
    ZeroNoise zn;
    const PathBundle refl =
        simulate_reflected_with(*dom, DriftFn{}, Vec{0.4}, 0.0, 0.5, 1e-2, zn);
    ZeroNoise zn2;
    const PathBundle pen = simulate_penalized_with(*dom, DriftFn{}, 32, Vec{0.4},
                                                   0.0, 0.5, 1e-2, zn2);
    for (std::size_t k = 0; k < refl.states.size(); ++k)
      CHECK(refl.states[k].x() == pen.states[k].x());
  }

  SUBCASE("bundle pair shares the Brownian driver") {
    const auto [pen, refl] =
        simulate_coupled(*dom, DriftFn{}, 32, Vec{0.5}, 1.0, 1e-3, 606);
    REQUIRE(pen.steps() == refl.steps());
    for (std::size_t k = 0; k < refl.steps(); ++k)
      CHECK(pen.brownian[k].x() == doctest::Approx(refl.brownian[k].x()).epsilon(1e-13));
  }

  SUBCASE("penalization sweep shrinks both gap statistics") {
    double prev_d = 1e300, prev_k = 1e300;
    for (int n : {8, 32, 128}) {
      const CoupledStats st =
          coupled_ensemble(*dom, DriftFn{}, n, Vec{0.5}, 1.0, 2e-4, 1500, 41);
      CHECK(st.sup_dist_sq.mean < prev_d);
      CHECK(st.sup_k_gap.mean < prev_k);
      prev_d = st.sup_dist_sq.mean;
      prev_k = st.sup_k_gap.mean;
    }
  }
}

TEST_CASE("local time moments") {
  auto dom = make_interval(-1.0, 1.0);

  SUBCASE("mu = 0 gives exactly one with zero error") {
    const MomentEstimate m =
        local_time_exp_moment(*dom, Vec{0.0}, 0.0, 1.0, 1e-2, 500, 11);
    CHECK(m.mean == 1.0);
    CHECK(m.se == 0.0);
    CHECK_FALSE(m.overflow);
  }

  SUBCASE("monotone in mu") {
    double prev = 0.0;
    for (double mu : {0.0, 0.5, 1.0}) {
      const MomentEstimate m =
          local_time_exp_moment(*dom, Vec{0.5}, mu, 1.0, 2e-3, 2000, 19);
      CHECK(m.mean >= prev);
      prev = m.mean;
    }
  }

  SUBCASE("mu < 0 rejected") {
    CHECK_THROWS_AS(
        local_time_exp_moment(*dom, Vec{0.0}, -1.0, 1.0, 1e-2, 10, 1),
        std::invalid_argument);
  }

  SUBCASE("mean local time grows with the horizon") {
    double prev = -1.0;
    for (double T : {1.0, 2.0, 4.0}) {
      const MomentEstimate m =
          local_time_mean(*dom, Vec{0.0}, T, 2e-3, 2000, 23);
      CHECK(m.mean > prev);
      prev = m.mean;
    }
  }
}
