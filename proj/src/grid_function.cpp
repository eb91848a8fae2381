#include "neupde/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace neupde {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("linspace: n >= 2");
  std::vector<double> v(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * h;
  v.back() = hi;
  return v;
}

namespace {

std::size_t bracket(const std::vector<double>& nodes, double v) {
  // clamped cell index for interpolation
  if (nodes.size() < 2) return 0;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  if (i == 0) return 0;
  if (i >= nodes.size()) return nodes.size() - 2;
  return i - 1;
}

double bilinear(const GridFunction& g, const std::vector<double>& field,
                double t, double x) {
  const std::size_t nx = g.nx();
  const std::size_t it = bracket(g.t_nodes, t);
  const std::size_t ix = bracket(g.x_nodes, x);
  const double t0 = g.t_nodes[it], t1 = g.t_nodes[std::min(it + 1, g.nt() - 1)];
  const double x0 = g.x_nodes[ix], x1 = g.x_nodes[std::min(ix + 1, nx - 1)];
  const double wt = (t1 > t0) ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
  const double wx = (x1 > x0) ? std::clamp((x - x0) / (x1 - x0), 0.0, 1.0) : 0.0;
  const std::size_t i00 = it * nx + ix;
  const std::size_t i01 = it * nx + std::min(ix + 1, nx - 1);
  const std::size_t i10 = std::min(it + 1, g.nt() - 1) * nx + ix;
  const std::size_t i11 = std::min(it + 1, g.nt() - 1) * nx + std::min(ix + 1, nx - 1);
  return (1.0 - wt) * ((1.0 - wx) * field[i00] + wx * field[i01]) +
         wt * ((1.0 - wx) * field[i10] + wx * field[i11]);
}

}  // namespace

double GridFunction::value_at(double t, double x) const {
  return bilinear(*this, values, t, x);
}

double GridFunction::gradient_at(double t, double x) const {
  return bilinear(*this, gradient, t, x);
}

std::vector<double> GridFunction::gradient_from_values(
    const std::vector<double>& values, std::size_t nt, std::size_t nx,
    double hx) {
  std::vector<double> g(values.size(), 0.0);
  if (nx < 3) return g;
  for (std::size_t it = 0; it < nt; ++it) {
    const std::size_t base = it * nx;
    g[base] = (-3.0 * values[base] + 4.0 * values[base + 1] - values[base + 2]) /
              (2.0 * hx);
    for (std::size_t ix = 1; ix + 1 < nx; ++ix)
      g[base + ix] = (values[base + ix + 1] - values[base + ix - 1]) / (2.0 * hx);
    g[base + nx - 1] = (3.0 * values[base + nx - 1] - 4.0 * values[base + nx - 2] +
                        values[base + nx - 3]) /
                       (2.0 * hx);
  }
  return g;
}

void GridFunction::recompute_gradient() {
  const double hx = (x_nodes.back() - x_nodes.front()) /
                    static_cast<double>(x_nodes.size() - 1);
  gradient = gradient_from_values(values, nt(), nx(), hx);
}

void GridFunction::write_csv(const std::filesystem::path& path) const {
  std::ostringstream os;
  os << "t,x,u,z,se\n";
  char buf[128];
  for (std::size_t it = 0; it < nt(); ++it) {
    for (std::size_t ix = 0; ix < nx(); ++ix) {
      const std::size_t i = it * nx() + ix;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    t_nodes[it], x_nodes[ix], values[i], gradient[i],
                    se.empty() ? 0.0 : se[i]);
      os << buf;
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << os.str();
  if (!out.good()) throw std::runtime_error("write failed: " + path.string());
}

GridFunction GridFunction::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());

  struct Row {
    double t, x, u, z, se;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row r{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r.t, &r.x, &r.u, &r.z,
                    &r.se) != 5)
      throw std::runtime_error("bad csv row: " + line);
    rows.push_back(r);
  }

  std::set<double> ts, xs;
  for (const auto& r : rows) {
    ts.insert(r.t);
    xs.insert(r.x);
  }
  GridFunction g;
  g.t_nodes.assign(ts.begin(), ts.end());
  g.x_nodes.assign(xs.begin(), xs.end());
  const std::size_t n = g.nt() * g.nx();
  if (rows.size() != n)
    throw std::runtime_error("csv is not a full product grid: " + path.string());
  g.values.assign(n, 0.0);
  g.gradient.assign(n, 0.0);
  g.se.assign(n, 0.0);
  auto index_of = [](const std::vector<double>& nodes, double v) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
    return static_cast<std::size_t>(it - nodes.begin());
  };
  for (const auto& r : rows) {
    const std::size_t i = index_of(g.t_nodes, r.t) * g.nx() + index_of(g.x_nodes, r.x);
    g.values[i] = r.u;
    g.gradient[i] = r.z;
    g.se[i] = r.se;
  }
  return g;
}

}  // namespace neupde
