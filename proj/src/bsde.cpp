#include "neupde/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "neupde/fd_solver.hpp"
#include "neupde/parallel.hpp"
#include "neupde/path_engine.hpp"
#include "neupde/rng.hpp"

namespace neupde {

namespace {

constexpr std::size_t kChunk = 256;

void require_compatible(const Coefficients& coef, const LiftField& lift) {
  if (!coef.linear)
    throw std::invalid_argument("mc solver: linear coefficients required");
  if (lift.source() != coef.name)
    throw std::invalid_argument("mc solver: lift was built from '" +
                                lift.source() + "', coefficients are '" +
                                coef.name + "'");
  if (lift.is_numeric() && lift.mode() != LiftBoundary::natural)
    throw std::invalid_argument(
        "mc solver: the transformed drivers require the natural-flux lift");
}

}  // namespace

MeanSe linear_mc_at(const Domain& dom, const Coefficients& coef,
                    const LiftField& lift, double t, const Vec& x,
                    const McConfig& mc, std::uint64_t node_tag) {
  const double T = coef.horizon;
  const Vec zero_z(dom.dim(), 0.0);
  const std::uint64_t node_master = stream_seed(mc.seed, "linear_mc", node_tag);

  const std::size_t n_paths = static_cast<std::size_t>(mc.paths);
  std::vector<ChunkSums> chunks(chunk_count(n_paths, kChunk));
  parallel_chunks(
      n_paths, kChunk, mc.workers,
      [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
          GaussNoise noise(stream_seed(node_master, "path", p));
          double running = 0.0;
          Vec x_end = x;
          walk_reflected(
              dom, DriftFn{}, x, t, T, mc.dt, noise,
              [&](const ReflectedStep& s) {
                const double h_step = s.t1 - s.t0;
                const LiftField::Eval gv = lift.eval(s.t0, s.x0);
                const double f_lift =
                    coef.f(s.t0, s.x0, 0.0, zero_z) + 2.0 * gv.dt + gv.value;
                running += f_lift * h_step;
                if (s.dl > 0.0)
                  running += coef.h(s.t1, s.x1, 0.0) * s.dl;
                x_end = s.x1;
              });
          const double terminal =
              coef.terminal(x_end) - 2.0 * lift.eval(T, x_end).value;
          chunks[c].add(terminal + running);
        }
      });
  MeanSe ms = combine_chunks(chunks);
  ms.mean += 2.0 * lift.eval(t, x).value;
  return ms;
}

GridFunction solve_linear_mc(const Domain& dom, const Coefficients& coef,
                             const LiftField& lift,
                             const std::vector<double>& t_nodes,
                             const std::vector<double>& x_nodes,
                             const McConfig& mc) {
  require_compatible(coef, lift);
  GridFunction out;
  out.t_nodes = t_nodes;
  out.x_nodes = x_nodes;
  const std::size_t nt = t_nodes.size(), nx = x_nodes.size();
  out.values.assign(nt * nx, 0.0);
  out.se.assign(nt * nx, 0.0);
  out.flags.assign(nt * nx, 0);
  out.meta.solver = "mc";
  out.meta.seed = mc.seed;
  out.meta.dt = mc.dt;
  out.meta.paths = mc.paths;

  const double T = coef.horizon;
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t i = it * nx + ix;
      const Vec xv{x_nodes[ix]};
      if (std::abs(t_nodes[it] - T) <= 1e-14) {
        out.values[i] = coef.terminal(xv);
        continue;
      }
      const MeanSe ms = linear_mc_at(dom, coef, lift, t_nodes[it], xv, mc, i);
      out.values[i] = ms.mean;
      out.se[i] = ms.se;
      if (ms.se > mc.se_cap) out.flags[i] = 1;
    }
  }
  out.recompute_gradient();
  return out;
}

GridFunction solve_penalized_bsde(const Domain& dom, const Coefficients& coef,
                                  const LiftField& lift, int n_penalty,
                                  const std::vector<double>& t_nodes,
                                  const std::vector<double>& x_nodes,
                                  const McConfig& mc) {
  require_compatible(coef, lift);
  if (n_penalty <= 0)
    throw std::invalid_argument("solve_penalized_bsde: n > 0 required");
  GridFunction out;
  out.t_nodes = t_nodes;
  out.x_nodes = x_nodes;
  const std::size_t nt = t_nodes.size(), nx = x_nodes.size();
  out.values.assign(nt * nx, 0.0);
  out.se.assign(nt * nx, 0.0);
  out.flags.assign(nt * nx, 0);
  out.meta.solver = "penalized_mc";
  out.meta.seed = mc.seed;
  out.meta.dt = mc.dt;
  out.meta.paths = mc.paths;
  out.meta.penalty = n_penalty;

  const double T = coef.horizon;
  const Vec zero_z(dom.dim(), 0.0);
  const double escape = default_escape_radius(dom);

  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t i = it * nx + ix;
      const Vec xv{x_nodes[ix]};
      const double t = t_nodes[it];
      if (std::abs(t - T) <= 1e-14) {
        out.values[i] = coef.terminal(xv);
        continue;
      }
      const std::uint64_t node_master = stream_seed(mc.seed, "penalized_mc", i);
      const std::size_t n_paths = static_cast<std::size_t>(mc.paths);
      std::vector<ChunkSums> chunks(chunk_count(n_paths, kChunk));
      parallel_chunks(
          n_paths, kChunk, mc.workers,
          [&](std::size_t c, std::size_t b, std::size_t e) {
            for (std::size_t p = b; p < e; ++p) {
              GaussNoise noise(stream_seed(node_master, "path", p));
              double running = 0.0;
              Vec x_end = xv;
              walk_penalized(
                  dom, DriftFn{}, n_penalty, xv, t, T, mc.dt, escape, noise,
                  [&](const PenalizedStep& s) {
                    const double h_step = s.t1 - s.t0;
                    const LiftField::Eval gv = lift.eval(s.t0, s.x0);
                    running += (coef.f(s.t0, s.x0, 0.0, zero_z) + gv.value +
                                2.0 * gv.dt) *
                               h_step;
                    if (dom.dist_sq(s.x0) > 0.0) {
                      const Vec pi = dom.project(s.x0);
                      const double dn =
                          dot(dom.penal_delta(s.x0), dom.inward_normal(pi));
                      running -= n_penalty * dn * coef.h(s.t0, pi, 0.0) * h_step;
                    }
                    x_end = s.x1;
                  });
              const double terminal =
                  coef.terminal(x_end) - 2.0 * lift.eval(T, x_end).value;
              chunks[c].add(terminal + running);
            }
          });
      MeanSe ms = combine_chunks(chunks);
      out.values[i] = ms.mean + 2.0 * lift.eval(t, xv).value;
      out.se[i] = ms.se;
      if (ms.se > mc.se_cap) out.flags[i] = 1;
    }
  }
  out.recompute_gradient();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Time profiles of the norm weights, estimated once from reflected paths
/// started uniformly on D: exp_moment[i] ~ E[e^{mu L_{t_i}}] and
/// boundary_rate[i] ~ d/dt E[e^{mu L_t} dL_t] around t_i.
struct NormWeights {
  std::vector<double> exp_moment;
  std::vector<double> boundary_rate;
};

NormWeights estimate_norm_weights(const Interval& dom, double mu,
                                  const std::vector<double>& t_nodes,
                                  double dt, long paths, std::uint64_t seed,
                                  unsigned workers) {
  const std::size_t nt = t_nodes.size();
  const double T = t_nodes.back();
  const std::size_t n_paths = static_cast<std::size_t>(paths);
  const std::size_t nc = chunk_count(n_paths, kChunk);
  std::vector<std::vector<double>> w_chunk(nc), r_chunk(nc);

  parallel_chunks(n_paths, kChunk, workers, [&](std::size_t c, std::size_t b,
                                                std::size_t e) {
    w_chunk[c].assign(nt, 0.0);
    r_chunk[c].assign(nt, 0.0);
    std::uniform_real_distribution<double> unif(dom.a(), dom.b());
    for (std::size_t p = b; p < e; ++p) {
      Xoshiro256 start_eng(stream_seed(seed, "norm_weight_start", p));
      const Vec x0{unif(start_eng)};
      GaussNoise noise(stream_seed(seed, "norm_weight_path", p));
      double lt = 0.0;
      std::size_t next_node = 0;
      walk_reflected(dom, DriftFn{}, x0, 0.0, T, dt, noise,
                     [&](const ReflectedStep& s) {
                       while (next_node < nt && t_nodes[next_node] <= s.t0 + 1e-15) {
                         w_chunk[c][next_node] += std::exp(mu * lt);
                         ++next_node;
                       }
                       if (s.dl > 0.0) {
                         // bin the weighted local-time increment by time node
                         const double pos = s.t1 / T * (nt - 1);
                         const std::size_t bin = std::min<std::size_t>(
                             nt - 1, static_cast<std::size_t>(pos + 0.5));
                         r_chunk[c][bin] += std::exp(mu * lt) * s.dl;
                       }
                       lt += s.dl;
                     });
      while (next_node < nt) {
        w_chunk[c][next_node] += std::exp(mu * lt);
        ++next_node;
      }
    }
  });

  NormWeights nw;
  nw.exp_moment.assign(nt, 0.0);
  nw.boundary_rate.assign(nt, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < nt; ++i) {
      nw.exp_moment[i] += w_chunk[c].empty() ? 0.0 : w_chunk[c][i];
      nw.boundary_rate[i] += r_chunk[c].empty() ? 0.0 : r_chunk[c][i];
    }
  }
  const double inv_paths = 1.0 / static_cast<double>(paths);
  const double bin_width = T / static_cast<double>(nt - 1);
  for (std::size_t i = 0; i < nt; ++i) {
    nw.exp_moment[i] *= inv_paths;
    nw.boundary_rate[i] *= inv_paths / bin_width;
  }
  return nw;
}

struct WeightedDistance {
  double value = 0.0;
  double se = 0.0;
};

WeightedDistance weighted_mc_distance(const GridFunction& a,
                                      const GridFunction& b, double lambda,
                                      double delta, const NormWeights& nw) {
  const std::size_t nt = a.nt(), nx = a.nx();
  double acc = 0.0, var_acc = 0.0;
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = a.t_nodes[it];
    const double wt =
        (it == 0 || it + 1 == nt)
            ? 0.5 * (a.t_nodes[std::min(it + 1, nt - 1)] -
                     a.t_nodes[it == 0 ? 0 : it - 1])
            : 0.5 * (a.t_nodes[it + 1] - a.t_nodes[it - 1]);
    const double wfac = wt * std::exp(lambda * t) * nw.exp_moment[it];
    double slice = 0.0, slice_var = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t i = it * nx + ix;
      const double du = a.values[i] - b.values[i];
      const double dz = a.gradient[i] - b.gradient[i];
      slice += du * du + dz * dz;
      const double se2 = a.se[i] * a.se[i] + b.se[i] * b.se[i];
      slice_var += 4.0 * du * du * se2;
    }
    acc += wfac * slice / static_cast<double>(nx);
    var_acc += wfac * wfac * slice_var / static_cast<double>(nx * nx);

    // local-time part: boundary nodes against the weighted boundary rate
    const double du_a = a.values[it * nx] - b.values[it * nx];
    const double du_b = a.values[it * nx + nx - 1] - b.values[it * nx + nx - 1];
    const double bnd = 0.5 * (du_a * du_a + du_b * du_b);
    acc += delta * wt * std::exp(lambda * t) * nw.boundary_rate[it] * bnd;
  }
  WeightedDistance out;
  out.value = std::sqrt(std::max(0.0, acc));
  if (out.value > 0.0) out.se = 0.5 * std::sqrt(var_acc) / out.value;
  return out;
}

}  // namespace

PicardResult picard_solve_mc(const Interval& dom, const Coefficients& coef,
                             const Assumptions& assume,
                             const std::vector<double>& t_nodes,
                             const std::vector<double>& x_nodes,
                             const McPicardConfig& cfg,
                             const PicardOptions& opts) {
  if (!assume.gamma_small())
    throw std::invalid_argument("picard_solve_mc: 2*sqrt(2)*gamma >= 1");
  if (!assume.beta_trace_ok())
    throw std::invalid_argument("picard_solve_mc: beta*Tr^2 >= 1");
  const ContractionConstants cc = contraction_constants(assume);
  if (!cc.probabilistic.feasible)
    throw std::invalid_argument("picard_solve_mc: probabilistic route infeasible: " +
                                cc.probabilistic.binding);
  const double lambda = cc.probabilistic.lambda;
  const double mu = cc.probabilistic.mu;
  const double delta = cc.probabilistic.delta;

  const NormWeights nw = estimate_norm_weights(
      dom, mu, t_nodes, cfg.mc.dt, cfg.weight_paths,
      stream_seed(cfg.mc.seed, "picard_weights", 0), cfg.mc.workers);

  PicardResult res;
  GridFunction cur;
  cur.t_nodes = t_nodes;
  cur.x_nodes = x_nodes;
  cur.values.assign(t_nodes.size() * x_nodes.size(), 0.0);
  cur.gradient.assign(cur.values.size(), 0.0);
  cur.se.assign(cur.values.size(), 0.0);

  double prev_d = -1.0, prev_se = 0.0;
  int rising = 0;
  for (int k = 0; k < opts.max_iter; ++k) {
    const Coefficients frozen = freeze_coefficients(coef, cur);
    const LiftField lift = solve_lift_spacetime(
        frozen, dom, cfg.lift_nodes, cfg.lift_slices, LiftBoundary::natural);
    GridFunction next =
        solve_linear_mc(dom, frozen, lift, t_nodes, x_nodes, cfg.mc);
    const WeightedDistance d = weighted_mc_distance(next, cur, lambda, delta, nw);

    PicardRecord rec;
    rec.k = k;
    rec.distance = d.value;
    rec.distance_se = d.se;
    if (k >= 1 && prev_d > 0.0) {
      rec.ratio = d.value / prev_d;
      rec.ratio_se = rec.ratio * std::sqrt(
          (d.se / std::max(d.value, 1e-300)) * (d.se / std::max(d.value, 1e-300)) +
          (prev_se / prev_d) * (prev_se / prev_d));
      if (rec.ratio > 1.0 + 3.0 * rec.ratio_se) {
        if (++rising >= 2) res.divergence_alarm = true;
      } else {
        rising = 0;
      }
    }
    res.history.push_back(rec);
    cur = std::move(next);
    res.iterations = k + 1;
    if (d.value < opts.tol) {
      res.converged = true;
      break;
    }
    if (res.divergence_alarm) break;
    prev_d = d.value;
    prev_se = d.se;
  }
  res.u = std::move(cur);
  return res;
}

}  // namespace neupde
