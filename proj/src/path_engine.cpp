#include "neupde/path_engine.hpp"

#include <algorithm>
#include <cmath>

#include "neupde/parallel.hpp"

namespace neupde {

namespace {
constexpr std::size_t kChunk = 256;

Vec uniform_point(const Domain& dom, Xoshiro256& eng) {
  auto [lo, hi] = dom.bounding_box();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = dom.dim();
  for (;;) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = lo[i] + (hi[i] - lo[i]) * unif(eng);
    if (dom.contains(x)) return x;
  }
}
}  // namespace

PathBundle simulate_reflected(const Domain& dom, const DriftFn& drift,
                              const Vec& x0, double t_start, double horizon,
                              double dt, std::uint64_t stream) {
  GaussNoise noise(stream);
  return simulate_reflected_with(dom, drift, x0, t_start, horizon, dt, noise);
}

PathBundle simulate_penalized(const Domain& dom, const DriftFn& drift,
                              int n_penalty, const Vec& x0, double t_start,
                              double horizon, double dt, std::uint64_t stream) {
  GaussNoise noise(stream);
  return simulate_penalized_with(dom, drift, n_penalty, x0, t_start, horizon,
                                 dt, noise);
}

namespace {

/// Replays a recorded increment sequence, so two schemes see the same driver.
struct ReplayNoise {
  const std::vector<Vec>* seq;
  double inv_sqrt_h;
  std::size_t k = 0;
  Vec draw(std::size_t) { return inv_sqrt_h * (*seq)[k++]; }
};

}  // namespace

std::pair<PathBundle, PathBundle> simulate_coupled(const Domain& dom,
                                                   const DriftFn& drift,
                                                   int n_penalty, const Vec& x0,
                                                   double horizon, double dt,
                                                   std::uint64_t stream) {
  PathBundle refl = simulate_reflected(dom, drift, x0, 0.0, horizon, dt, stream);
  const std::size_t m = refl.steps();
  const double h = m ? (horizon / static_cast<double>(m)) : dt;
  ReplayNoise replay{&refl.brownian, 1.0 / std::sqrt(h)};
  PathBundle pen = simulate_penalized_with(dom, drift, n_penalty, x0, 0.0,
                                           horizon, dt, replay);
  return {std::move(pen), std::move(refl)};
}

// ---------------------------------------------------------------------------

double forward_integral(const FieldFn& field, const PathBundle& path) {
  double acc = 0.0;
  for (std::size_t k = 0; k < path.steps(); ++k)
    acc += dot(field(path.t[k], path.states[k]), path.brownian[k]);
  return acc;
}

double backward_integral(const FieldFn& field, const PathBundle& path) {
  if (path.kind != PathKind::reflected)
    throw std::invalid_argument("backward_integral: reflected bundle required");
  double acc = 0.0;
  for (std::size_t k = 0; k < path.steps(); ++k) {
    const double t1 = path.t[k + 1];
    acc -= dot(field(t1, path.proposals[k]), path.brownian[k]);
    const double dl = path.local_time[k];
    if (dl > 0.0)
      acc -= 2.0 * dl * dot(field(t1, path.states[k + 1]), path.normals[k]);
  }
  return acc;
}

double star_integral(const FieldFn& field, const PathBundle& path) {
  if (path.kind != PathKind::reflected)
    throw std::invalid_argument("star_integral: reflected bundle required");
  double acc = 0.0;
  for (std::size_t k = 0; k < path.steps(); ++k) {
    const double t1 = path.t[k + 1];
    acc += dot(field(path.t[k], path.states[k]), path.brownian[k]);
    acc -= dot(field(t1, path.proposals[k]), path.brownian[k]);
    const double dl = path.local_time[k];
    if (dl > 0.0) {
      const double bnd = 2.0 * dl * dot(field(t1, path.states[k + 1]), path.normals[k]);
      acc -= bnd;  // backward increment, local-time part
      acc += bnd;  // boundary term of the star combination
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------

namespace {

template <class PerPath>
MomentEstimate reflected_functional(const Domain& dom, const Vec& x0,
                                    double horizon, double dt, long paths,
                                    std::uint64_t seed, unsigned workers,
                                    const char* tag, PerPath per_path) {
  const std::size_t n_paths = static_cast<std::size_t>(paths);
  std::vector<ChunkSums> chunks(chunk_count(n_paths, kChunk));
  std::atomic<bool> overflow{false};
  parallel_chunks(n_paths, kChunk, workers,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
                    for (std::size_t p = b; p < e; ++p) {
                      GaussNoise noise(stream_seed(seed, tag, p));
                      double lt = 0.0;
                      walk_reflected(dom, DriftFn{}, x0, 0.0, horizon, dt,
                                     noise,
                                     [&lt](const ReflectedStep& s) { lt += s.dl; });
                      const double v = per_path(lt);
                      if (!std::isfinite(v)) overflow = true;
                      chunks[c].add(std::isfinite(v) ? v : 0.0);
                    }
                  });
  const MeanSe ms = combine_chunks(chunks);
  MomentEstimate out;
  out.mean = ms.mean;
  out.se = ms.se;
  out.paths = ms.n;
  out.overflow = overflow.load();
  return out;
}

}  // namespace

MomentEstimate local_time_exp_moment(const Domain& dom, const Vec& x0,
                                     double mu, double horizon, double dt,
                                     long paths, std::uint64_t seed,
                                     unsigned workers) {
  if (mu < 0.0) throw std::invalid_argument("local_time_exp_moment: mu >= 0");
  return reflected_functional(dom, x0, horizon, dt, paths, seed, workers,
                              "exp_moment",
                              [mu](double lt) { return std::exp(mu * lt); });
}

MomentEstimate local_time_mean(const Domain& dom, const Vec& x0, double horizon,
                               double dt, long paths, std::uint64_t seed,
                               unsigned workers) {
  return reflected_functional(dom, x0, horizon, dt, paths, seed, workers,
                              "local_time", [](double lt) { return lt; });
}

CoupledStats coupled_ensemble(const Domain& dom, const DriftFn& drift,
                              int n_penalty, const Vec& x0, double horizon,
                              double dt, long paths, std::uint64_t seed,
                              unsigned workers) {
  const std::size_t n_paths = static_cast<std::size_t>(paths);
  const std::size_t nc = chunk_count(n_paths, kChunk);
  std::vector<ChunkSums> sum_d(nc), sum_k(nc), sum_l(nc);
  const std::size_t dim = dom.dim();
  const double escape = default_escape_radius(dom);

  parallel_chunks(n_paths, kChunk, workers, [&](std::size_t c, std::size_t b,
                                                std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      GaussNoise noise(stream_seed(seed, "coupled", p));
      const std::size_t m = time_steps(0.0, horizon, dt);
      const double h = m ? horizon / static_cast<double>(m) : dt;
      const double sqrt_h = std::sqrt(h);
      const bool has_drift = static_cast<bool>(drift);
      const bool stiff = n_penalty * h > 0.5;
      const double decay = stiff ? std::exp(-2.0 * n_penalty * h) : 0.0;

      Vec xr = x0, xp = x0;               // reflected / penalized states
      Vec kr(dim, 0.0), kp(dim, 0.0);     // K and K^n cumulatives
      double sup_d2 = 0.0, sup_kg = 0.0, lt = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        Vec db = noise.draw(dim);
        db *= sqrt_h;
        // reflected member
        Vec prop = xr + db;
        if (has_drift) prop += h * drift(xr);
        if (!dom.contains(prop)) {
          const Vec x1 = dom.project(prop);
          const double dl = norm(prop - x1);
          kr += dl * dom.inward_normal(x1);
          lt += dl;
          xr = x1;
        } else {
          xr = prop;
        }
        // penalized member on the same increment
        if (!stiff) {
          const Vec dk = (-static_cast<double>(n_penalty) * h) * dom.penal_delta(xp);
          Vec x1 = xp + db + dk;
          if (has_drift) x1 += h * drift(xp);
          kp += dk;
          xp = x1;
        } else {
          Vec base = xp + db;
          if (has_drift) base += h * drift(xp);
          const Vec pi = dom.project(base);
          const Vec x1 = pi + decay * (base - pi);
          kp += x1 - base;
          xp = x1;
        }
        if (norm(xp) > escape)
          throw std::runtime_error("penalized path escaped the configured radius");
        sup_d2 = std::max(sup_d2, norm2(xp - xr));
        sup_kg = std::max(sup_kg, norm(kp - kr));
      }
      sum_d[c].add(sup_d2);
      sum_k[c].add(sup_kg);
      sum_l[c].add(lt);
    }
  });

  CoupledStats out;
  out.sup_dist_sq = combine_chunks(sum_d);
  out.sup_k_gap = combine_chunks(sum_k);
  out.local_time = combine_chunks(sum_l);
  out.paths = out.sup_dist_sq.n;
  return out;
}

StarCheck star_check(const Domain& dom, const FieldFn& field, double horizon,
                     double dt, long paths, std::uint64_t seed,
                     unsigned workers) {
  const std::size_t n_paths = static_cast<std::size_t>(paths);
  const std::size_t nc = chunk_count(n_paths, kChunk);
  std::vector<ChunkSums> sums(nc);
  std::vector<double> max_const(nc, 0.0);
  const std::size_t dim = dom.dim();
  const Vec ones(dim, 1.0);

  parallel_chunks(n_paths, kChunk, workers, [&](std::size_t c, std::size_t b,
                                                std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      Xoshiro256 start_eng(stream_seed(seed, "star_start", p));
      const Vec x0 = uniform_point(dom, start_eng);
      GaussNoise noise(stream_seed(seed, "star_path", p));
      double star = 0.0, star_const = 0.0;
      walk_reflected(dom, DriftFn{}, x0, 0.0, horizon, dt, noise,
                     [&](const ReflectedStep& s) {
                       star += dot(field(s.t0, s.x0), s.db);
                       star -= dot(field(s.t1, s.proposal), s.db);
                       star_const += dot(ones, s.db) - dot(ones, s.db);
                       if (s.dl > 0.0) {
                         const double bnd =
                             2.0 * s.dl * dot(field(s.t1, s.x1), s.normal);
                         star -= bnd;
                         star += bnd;
                         const double bc =
                             2.0 * s.dl * dot(ones, s.normal);
                         star_const -= bc;
                         star_const += bc;
                       }
                     });
      sums[c].add(star);
      max_const[c] = std::max(max_const[c], std::abs(star_const));
    }
  });

  StarCheck out;
  out.star = combine_chunks(sums);
  out.paths = out.star.n;
  for (double v : max_const) out.max_constant_star = std::max(out.max_constant_star, v);
  return out;
}

}  // namespace neupde
