#include "neupde/report.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "neupde/rng.hpp"

namespace neupde {

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp =
      path.string() + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string content_hash_hex(const std::string& content) {
  const std::uint64_t h = fnv1a64(content);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string CompareResult::to_csv() const {
  std::ostringstream os;
  os << "t,x,u_a,u_b,diff,tol,pass\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.t, r.x, r.value_a, r.value_b, r.diff, r.tol, r.pass ? 1 : 0);
    os << buf;
  }
  return os.str();
}

CompareResult compare_grids(const GridFunction& a, const GridFunction& b,
                            const CompareOptions& opts) {
  if (a.nt() != b.nt() || a.nx() != b.nx())
    throw std::invalid_argument("compare: incompatible grids");
  for (std::size_t i = 0; i < a.nt(); ++i)
    if (std::abs(a.t_nodes[i] - b.t_nodes[i]) > 1e-12)
      throw std::invalid_argument("compare: t nodes differ");
  for (std::size_t i = 0; i < a.nx(); ++i)
    if (std::abs(a.x_nodes[i] - b.x_nodes[i]) > 1e-12)
      throw std::invalid_argument("compare: x nodes differ");

  CompareResult out;
  for (std::size_t it = 0; it < a.nt(); ++it) {
    for (std::size_t ix = 0; ix < a.nx(); ++ix) {
      const std::size_t i = it * a.nx() + ix;
      CompareRow r;
      r.t = a.t_nodes[it];
      r.x = a.x_nodes[ix];
      r.value_a = a.values[i];
      r.value_b = b.values[i];
      r.diff = std::abs(r.value_a - r.value_b);
      const double se_a = a.se.empty() ? 0.0 : a.se[i];
      const double se_b = b.se.empty() ? 0.0 : b.se[i];
      r.tol = opts.se_factor * std::sqrt(se_a * se_a + se_b * se_b) +
              opts.bias_allowance;
      r.pass = r.diff <= r.tol;
      out.max_diff = std::max(out.max_diff, r.diff);
      out.worst_margin = std::max(out.worst_margin, r.diff - r.tol);
      out.pass = out.pass && r.pass;
      out.rows.push_back(r);
    }
  }
  return out;
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ostringstream os;
  for (const auto& l : lines_) os << l << '\n';
  atomic_write_text(path, os.str());
}

bool SolveReport::all_pass() const {
  for (const auto& [k, v] : verdicts)
    if (!v) return false;
  return true;
}

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["config"] = config_echo;
  j["config_hash"] = config_hash;
  j["tables"] = tables;
  j["metrics"] = metrics;
  j["verdicts"] = verdicts;
  j["pass"] = all_pass();
  return j.dump(2);
}

void SolveReport::write(const std::filesystem::path& path) const {
  atomic_write_text(path, to_json());
}

}  // namespace neupde
