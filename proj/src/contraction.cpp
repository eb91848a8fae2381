#include "neupde/contraction.hpp"

#include <cmath>
#include <vector>

namespace neupde {

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> v(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    v[i] = std::exp(llo + (lhi - llo) * i / static_cast<double>(count - 1));
  return v;
}

}  // namespace

ContractionConstants contraction_constants(const Assumptions& a) {
  ContractionConstants out;
  const double tr2 = a.trace_norm * a.trace_norm;
  const auto grid = log_grid(1e-3, 2.0, 160);

  // analytic route:
  //   numerator  alpha e + gamma/e + beta Tr^2 / e1
  //   denominator 1 - gamma e - beta Tr^2 e1   (must stay positive)
  // theta solves (theta - alpha/e - beta Tr^2 e1) / denominator = 1.
  {
    AnalyticWitness best;
    best.rho = 1.0;
    for (double e : grid) {
      for (double e1 : grid) {
        const double den = 1.0 - a.gamma * e - a.beta * tr2 * e1;
        if (den <= 0.0) continue;
        const double num = a.alpha * e + a.gamma / e + a.beta * tr2 / e1;
        if (num >= den) continue;
        const double rho = num / den;
        if (!best.feasible || rho < best.rho) {
          best.feasible = true;
          best.eps = e;
          best.eps1 = e1;
          best.rho = rho;
          best.theta = a.alpha / e + a.beta * tr2 * e1 + den;
        }
      }
    }
    if (a.alpha == 0.0 && a.beta == 0.0 && a.gamma == 0.0) {
      best.feasible = true;
      best.eps = best.eps1 = 1.0;
      best.rho = 0.0;
      best.theta = 1.0;
    }
    if (!best.feasible)
      best.binding = "no (eps, eps1) with alpha*eps + gamma/eps + beta*Tr^2/eps1 "
                     "< 1 - gamma*eps - beta*Tr^2*eps1";
    out.analytic = best;
  }

  // probabilistic route, under 2*sqrt(2)*gamma < 1:
  //   alpha^2/e1 + gamma^2/e3 < 1 - e3,  lambda - e1 = 1 - e3,
  //   (beta^2/e2) / (alpha^2/e1 + gamma^2/e3) = (mu - e2) / (1 - e3),
  // with e2 = e3 by convention.
  {
    ProbabilisticWitness best;
    best.rho = 1.0;
    if (!a.gamma_small()) {
      best.binding = "2*sqrt(2)*gamma >= 1";
      out.probabilistic = best;
      return out;
    }
    for (double e1 : grid) {
      for (double e3 : grid) {
        if (e3 >= 1.0) continue;
        const double lhs = a.alpha * a.alpha / e1 + a.gamma * a.gamma / e3;
        const double den = 1.0 - e3;
        if (lhs >= den) continue;
        const double rho = lhs / den;
        if (!best.feasible || rho < best.rho) {
          best.feasible = true;
          best.eps1 = e1;
          best.eps3 = e3;
          best.eps2 = e3;
          best.rho = rho;
          best.lambda = e1 + den;
          if (lhs > 0.0 && a.beta > 0.0) {
            const double ratio = (a.beta * a.beta / best.eps2) / lhs;
            best.mu = best.eps2 + den * ratio;
            best.delta = ratio;
          } else {
            best.mu = best.eps2;
            best.delta = 0.0;
          }
        }
      }
    }
    if (a.alpha == 0.0 && a.beta == 0.0 && a.gamma == 0.0) {
      best.feasible = true;
      best.eps1 = best.eps2 = best.eps3 = 0.5;
      best.rho = 0.0;
      best.lambda = 1.0;
      best.mu = best.eps2;
      best.delta = 0.0;
    }
    if (!best.feasible && best.binding.empty())
      best.binding = "no (eps1, eps3) with alpha^2/eps1 + gamma^2/eps3 < 1 - eps3";
    out.probabilistic = best;
  }
  return out;
}

}  // namespace neupde
