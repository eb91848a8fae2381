#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>

namespace neupde {

/// Fixed-capacity coordinate vector for points and states.  The engines in
/// this project run in low dimension (interval, disk), so a heap-free value
/// type keeps the path loops allocation-free.
class Vec {
 public:
  static constexpr std::size_t kMaxDim = 4;

  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : n_(n) {
    for (std::size_t i = 0; i < n_; ++i) a_[i] = fill;
  }
  Vec(std::initializer_list<double> xs) : n_(xs.size()) {
    std::size_t i = 0;
    for (double v : xs) a_[i++] = v;
  }
  static Vec scalar(double x) { return Vec{x}; }

  std::size_t size() const { return n_; }
  double& operator[](std::size_t i) { return a_[i]; }
  double operator[](std::size_t i) const { return a_[i]; }
  // 1-d convenience
  double x() const { return a_[0]; }

  Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (std::size_t i = 0; i < n_; ++i) a_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }

  friend double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n_; ++i) s += a.a_[i] * b.a_[i];
    return s;
  }
  friend double norm2(const Vec& a) { return dot(a, a); }
  friend double norm(const Vec& a) { return std::sqrt(norm2(a)); }

  friend std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << '(';
    for (std::size_t i = 0; i < v.n_; ++i) os << (i ? "," : "") << v.a_[i];
    return os << ')';
  }

 private:
  std::array<double, kMaxDim> a_{};
  std::size_t n_ = 0;
};

}  // namespace neupde
