#pragma once

#include <array>
#include <cmath>

namespace heatlayer {

/// Small fixed-capacity point/vector in R^n, n <= 3. The active dimension is
/// carried with the value so kernels can stay dimension-generic.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 0;

  Vec() = default;
  explicit Vec(double x) : c{x, 0.0, 0.0}, dim(1) {}
  Vec(double x, double y) : c{x, y, 0.0}, dim(2) {}
  Vec(double x, double y, double z) : c{x, y, z}, dim(3) {}

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double a) {
    for (int i = 0; i < dim; ++i) c[i] *= a;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double a, Vec v) { return v *= a; }
  friend Vec operator*(Vec v, double a) { return v *= a; }

  friend double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += a.c[i] * b.c[i];
    return s;
  }

  double norm2() const { return dot(*this, *this); }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec zero_vec(int dim) {
  Vec v;
  v.dim = dim;
  return v;
}

}  // namespace heatlayer
