#pragma once

#include <vector>

#include "heatlayer/vec.hpp"

namespace heatlayer {

/// Uniform causal time grid t_m = m*dt, m = 0..steps. The causal integral
/// int_0^{t_m} f dtau is discretized by the product rule: on each subinterval
/// the density is taken as the average of its endpoint values while the kernel
/// factor is integrated exactly in the lag variable (its weights absorb the
/// integrable endpoint singularity, so the lag-0 endpoint is never evaluated).
struct TimeGrid {
  double horizon = 1.0;  // T
  int steps = 2;         // K

  TimeGrid() = default;
  TimeGrid(double T, int K);

  double dt() const { return horizon / steps; }
  double node(int m) const { return m * dt(); }

  /// Weight of the density node m' in the discrete int_0^{t_m} for a smooth
  /// (kernel-free) integrand; sums exactly to t_m.
  double node_weight(int m, int mp) const;
};

/// Samples of a surface-time field (the layer density mu, the data g = -2*phi,
/// or an iterated right-hand side g_l). Row m=0 corresponds to t=0 where the
/// zero-initial-data convention forces the value 0.
struct DensityField {
  int nodes = 0;   // M surface nodes
  int steps = 0;   // K time steps (rows 0..K)
  double dt = 0.0;
  std::vector<double> values;  // (m, j) row-major

  static DensityField zeros(int M, int K, double dt);

  double& at(int m, int j) { return values[static_cast<std::size_t>(m) * nodes + j]; }
  double at(int m, int j) const {
    return values[static_cast<std::size_t>(m) * nodes + j];
  }

  double max_abs() const;

  DensityField& operator+=(const DensityField& o);
  DensityField& operator-=(const DensityField& o);
  DensityField& operator*=(double a);
};

double max_abs_diff(const DensityField& a, const DensityField& b);

}  // namespace heatlayer
