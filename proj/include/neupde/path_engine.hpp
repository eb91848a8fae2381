#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "neupde/domain.hpp"
#include "neupde/rng.hpp"
#include "neupde/stats.hpp"
#include "neupde/vec.hpp"

namespace neupde {

using DriftFn = std::function<Vec(const Vec&)>;
using FieldFn = std::function<Vec(double, const Vec&)>;

enum class PathKind { penalized, reflected };

/// One discretized trajectory.  Reflected bundles carry local-time
/// increments, contact normals and the pre-projection proposals; penalized
/// bundles carry the penalization increments dK = -n delta dt instead.
struct PathBundle {
  PathKind kind = PathKind::reflected;
  int penalty_level = 0;
  std::vector<double> t;         // M+1 grid nodes
  std::vector<Vec> states;       // M+1 states (post-projection)
  std::vector<Vec> proposals;    // M proposals before the constraint step
  std::vector<Vec> brownian;     // M Brownian increments
  std::vector<double> local_time;  // M increments, >= 0 (reflected)
  std::vector<Vec> normals;      // M contact normals (zero when no contact)
  std::vector<Vec> penal;        // M penalization increments (penalized)

  std::size_t steps() const { return brownian.size(); }
  double local_time_total() const {
    double s = 0.0;
    for (double v : local_time) s += v;
    return s;
  }
};

inline std::size_t time_steps(double t_start, double horizon, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("path: dt > 0 required");
  const double span = horizon - t_start;
  if (span <= 1e-14) return 0;
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

struct ReflectedStep {
  std::size_t k;
  double t0, t1;
  const Vec& x0;
  const Vec& db;
  const Vec& proposal;  // x0 + db + b(x0) dt, before projection
  const Vec& x1;        // state after projection
  double dl;            // projection push distance
  const Vec& normal;    // inward normal at x1 when dl > 0, zero otherwise
};

/// Projection scheme for the reflected diffusion: propose a free Euler step,
/// then project onto closure(D); the pushed distance is the local-time
/// increment and the contact normal is recorded at the projected point.
template <class Noise, class Visitor>
void walk_reflected(const Domain& dom, const DriftFn& drift, Vec x,
                    double t_start, double horizon, double dt, Noise& noise,
                    Visitor&& visit) {
  if (!dom.contains(x)) throw std::invalid_argument("reflected: x0 outside closure(D)");
  const std::size_t m = time_steps(t_start, horizon, dt);
  if (m == 0) return;
  const double h = (horizon - t_start) / static_cast<double>(m);
  const double sqrt_h = std::sqrt(h);
  const bool has_drift = static_cast<bool>(drift);
  const std::size_t n = dom.dim();
  const Vec zero(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double t0 = t_start + static_cast<double>(k) * h;
    const double t1 = (k + 1 == m) ? horizon : t0 + h;
    Vec db = noise.draw(n);
    db *= sqrt_h;
    Vec prop = x + db;
    if (has_drift) prop += h * drift(x);
    double dl = 0.0;
    Vec x1 = prop;
    Vec nrm = zero;
    if (!dom.contains(prop)) {
      x1 = dom.project(prop);
      dl = norm(prop - x1);
      nrm = dom.inward_normal(x1);
    }
    visit(ReflectedStep{k, t0, t1, x, db, prop, x1, dl, nrm});
    x = x1;
  }
}

struct PenalizedStep {
  std::size_t k;
  double t0, t1;
  const Vec& x0;
  const Vec& db;
  const Vec& x1;
  const Vec& dk;  // penalization increment
};

/// Penalized diffusion: explicit Euler with the inward drift -n delta(x).
/// When n*dt exceeds the explicit stability range the penalization substep
/// uses the exact linear flow toward the projection point, which is the
/// solution of xdot = -n delta(x) for convex domains.
template <class Noise, class Visitor>
void walk_penalized(const Domain& dom, const DriftFn& drift, int n_penalty,
                    Vec x, double t_start, double horizon, double dt,
                    double escape_radius, Noise& noise, Visitor&& visit) {
  if (n_penalty <= 0) throw std::invalid_argument("penalized: n > 0 required");
  const std::size_t m = time_steps(t_start, horizon, dt);
  if (m == 0) return;
  const double h = (horizon - t_start) / static_cast<double>(m);
  const double sqrt_h = std::sqrt(h);
  const bool has_drift = static_cast<bool>(drift);
  const bool stiff = n_penalty * h > 0.5;
  const double decay = stiff ? std::exp(-2.0 * n_penalty * h) : 0.0;
  const std::size_t n = dom.dim();
  for (std::size_t k = 0; k < m; ++k) {
    const double t0 = t_start + static_cast<double>(k) * h;
    const double t1 = (k + 1 == m) ? horizon : t0 + h;
    Vec db = noise.draw(n);
    db *= sqrt_h;
    Vec x1(n, 0.0);
    Vec dk(n, 0.0);
    if (!stiff) {
      dk = (-static_cast<double>(n_penalty) * h) * dom.penal_delta(x);
      x1 = x + db + dk;
      if (has_drift) x1 += h * drift(x);
    } else {
      Vec base = x + db;
      if (has_drift) base += h * drift(x);
      const Vec pi = dom.project(base);
      x1 = pi + decay * (base - pi);
      dk = x1 - base;
    }
    if (norm(x1) > escape_radius)
      throw std::runtime_error("penalized path escaped the configured radius");
    visit(PenalizedStep{k, t0, t1, x, db, x1, dk});
    x = x1;
  }
}

inline double default_escape_radius(const Domain& dom) {
  auto [lo, hi] = dom.bounding_box();
  return norm(lo) + norm(hi) + 20.0 * dom.diameter();
}

// --- bundle-producing wrappers ---------------------------------------------

PathBundle simulate_reflected(const Domain& dom, const DriftFn& drift,
                              const Vec& x0, double t_start, double horizon,
                              double dt, std::uint64_t stream);

PathBundle simulate_penalized(const Domain& dom, const DriftFn& drift,
                              int n_penalty, const Vec& x0, double t_start,
                              double horizon, double dt, std::uint64_t stream);

/// Both schemes driven by the same Brownian increments (common random
/// numbers), so pathwise distances between them are meaningful.
std::pair<PathBundle, PathBundle> simulate_coupled(const Domain& dom,
                                                   const DriftFn& drift,
                                                   int n_penalty, const Vec& x0,
                                                   double horizon, double dt,
                                                   std::uint64_t stream);

// Test-hook variants with caller-supplied noise.
template <class Noise>
PathBundle simulate_reflected_with(const Domain& dom, const DriftFn& drift,
                                   const Vec& x0, double t_start,
                                   double horizon, double dt, Noise& noise) {
  PathBundle b;
  b.kind = PathKind::reflected;
  const std::size_t m = time_steps(t_start, horizon, dt);
  b.t.reserve(m + 1);
  b.t.push_back(t_start);
  b.states.reserve(m + 1);
  b.states.push_back(x0);
  walk_reflected(dom, drift, x0, t_start, horizon, dt, noise,
                 [&b](const ReflectedStep& s) {
                   b.t.push_back(s.t1);
                   b.states.push_back(s.x1);
                   b.proposals.push_back(s.proposal);
                   b.brownian.push_back(s.db);
                   b.local_time.push_back(s.dl);
                   b.normals.push_back(s.normal);
                 });
  return b;
}

template <class Noise>
PathBundle simulate_penalized_with(const Domain& dom, const DriftFn& drift,
                                   int n_penalty, const Vec& x0, double t_start,
                                   double horizon, double dt, Noise& noise) {
  PathBundle b;
  b.kind = PathKind::penalized;
  b.penalty_level = n_penalty;
  const std::size_t m = time_steps(t_start, horizon, dt);
  b.t.reserve(m + 1);
  b.t.push_back(t_start);
  b.states.reserve(m + 1);
  b.states.push_back(x0);
  walk_penalized(dom, drift, n_penalty, x0, t_start, horizon, dt,
                 default_escape_radius(dom), noise,
                 [&b](const PenalizedStep& s) {
                   b.t.push_back(s.t1);
                   b.states.push_back(s.x1);
                   b.brownian.push_back(s.db);
                   b.penal.push_back(s.dk);
                 });
  return b;
}

// --- discrete stochastic integrals ------------------------------------------

/// Left-endpoint Ito sum  sum_k <field(t_k, X_k), dB_k>.
double forward_integral(const FieldFn& field, const PathBundle& path);

/// Right-endpoint sum against the backward increments
/// dBbar_k = -dB_k - 2 n_k dL_k.  The Brownian part is evaluated at the
/// pre-projection proposal (uncorrelated with the projection push within the
/// step); the local-time part at the projected boundary point.
/// Reflected bundles only.
double backward_integral(const FieldFn& field, const PathBundle& path);

/// forward + backward + 2 sum_k <field(t_{k+1}, X_{k+1}), n_k> dL_k.
/// Telescopes to exactly zero for constant fields; for smooth fields its
/// ensemble mean approximates -integral of div(field) along the path.
double star_integral(const FieldFn& field, const PathBundle& path);

// --- ensemble estimators ----------------------------------------------------

struct MomentEstimate {
  double mean = 0.0;
  double se = 0.0;
  long paths = 0;
  bool overflow = false;
};

/// Monte Carlo estimate of E[exp(mu * L_T)] for the reflected diffusion.
MomentEstimate local_time_exp_moment(const Domain& dom, const Vec& x0,
                                     double mu, double horizon, double dt,
                                     long paths, std::uint64_t seed,
                                     unsigned workers = 1);

/// Monte Carlo estimate of E[L_T].
MomentEstimate local_time_mean(const Domain& dom, const Vec& x0,
                               double horizon, double dt, long paths,
                               std::uint64_t seed, unsigned workers = 1);

struct CoupledStats {
  MeanSe sup_dist_sq;  // E[ sup_k |X^n_k - X_k|^2 ]
  MeanSe sup_k_gap;    // E[ sup_k |K^n_k - K_k| ]
  MeanSe local_time;   // E[ L_T ] of the reflected member
  long paths = 0;
};

/// Ensemble statistics of the coupled pair under common random numbers.
CoupledStats coupled_ensemble(const Domain& dom, const DriftFn& drift,
                              int n_penalty, const Vec& x0, double horizon,
                              double dt, long paths, std::uint64_t seed,
                              unsigned workers = 1);

struct StarCheck {
  MeanSe star;          // ensemble mean of the star integral
  double max_constant_star = 0.0;  // max |star| of the unit constant field
  long paths = 0;
};

/// Runs the divergence identity experiment: star integrals of `field` from
/// uniformly sampled starting points, plus the constant-field null check on
/// the same paths.
StarCheck star_check(const Domain& dom, const FieldFn& field, double horizon,
                     double dt, long paths, std::uint64_t seed,
                     unsigned workers = 1);

}  // namespace neupde
