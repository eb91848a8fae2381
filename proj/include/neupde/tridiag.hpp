#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace neupde {

/// Symmetric tridiagonal system in the three-band layout used by the 1-d
/// assemblies here: diag[i]*x[i] + lower[i]*x[i-1] + upper[i]*x[i+1] = rhs[i].
struct Tridiag {
  std::vector<double> lower;  // lower[0] unused
  std::vector<double> diag;
  std::vector<double> upper;  // upper[n-1] unused

  explicit Tridiag(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const { return diag.size(); }

  std::vector<double> multiply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += lower[i] * x[i - 1];
      if (i + 1 < n) v += upper[i] * x[i + 1];
      y[i] = v;
    }
    return y;
  }
};

/// Thomas algorithm.  The assemblies solved here are diagonally dominant,
/// so no pivoting is required.
inline std::vector<double> solve_tridiag(const Tridiag& m,
                                         std::vector<double> rhs) {
  const std::size_t n = m.size();
  if (rhs.size() != n) throw std::invalid_argument("tridiag: size mismatch");
  std::vector<double> c(n, 0.0);
  double piv = m.diag[0];
  if (piv == 0.0) throw std::runtime_error("tridiag: zero pivot");
  c[0] = m.upper[0] / piv;
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = m.diag[i] - m.lower[i] * c[i - 1];
    if (piv == 0.0) throw std::runtime_error("tridiag: zero pivot");
    c[i] = m.upper[i] / piv;
    rhs[i] = (rhs[i] - m.lower[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace neupde
