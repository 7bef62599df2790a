#include "heatlayer/grids.hpp"

#include <cmath>
#include <stdexcept>

namespace heatlayer {

TimeGrid::TimeGrid(double T, int K) : horizon(T), steps(K) {
  if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
  if (K < 2) throw std::invalid_argument("TimeGrid: steps must be >= 2");
}

double TimeGrid::node_weight(int m, int mp) const {
  if (mp < 0 || mp > m || m == 0) return 0.0;
  if (mp == 0 || mp == m) return 0.5 * dt();
  return dt();
}

DensityField DensityField::zeros(int M, int K, double dt) {
  DensityField f;
  f.nodes = M;
  f.steps = K;
  f.dt = dt;
  f.values.assign(static_cast<std::size_t>(K + 1) * M, 0.0);
  return f;
}

double DensityField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

DensityField& DensityField::operator+=(const DensityField& o) {
  if (o.values.size() != values.size())
    throw std::invalid_argument("DensityField: size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

DensityField& DensityField::operator-=(const DensityField& o) {
  if (o.values.size() != values.size())
    throw std::invalid_argument("DensityField: size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

DensityField& DensityField::operator*=(double a) {
  for (double& v : values) v *= a;
  return *this;
}

double max_abs_diff(const DensityField& a, const DensityField& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace heatlayer
