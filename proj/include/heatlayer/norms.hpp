#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "heatlayer/vec.hpp"

namespace heatlayer {

/// Exponents of the anisotropic space W^{r,s}_{p,q}: r spatial smoothness,
/// s temporal smoothness, p spatial and q temporal integrability (q may be
/// +infinity, handled as a sup over time samples), alpha the fractional order
/// of the L_q(0,T; W^alpha_p) scale.
struct NormParams {
  double r = 0.0;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  double alpha = 0.0;
};

/// The four summands of the W^{r,s}_{p,q} norm: spatial-derivative integrals,
/// spatial fractional seminorm, time-derivative integrals, time fractional
/// seminorm. Integer smoothness skips the corresponding seminorm term.
struct NormBreakdown {
  double term1 = 0.0;
  double term2 = 0.0;
  double term3 = 0.0;
  double term4 = 0.0;
  double total = 0.0;

  std::string to_csv(const NormParams& params) const;
};

enum class SpatialLayout { interval, circle, box2d, polar_disk };

/// Samples of a function on (spatial grid) x (time grid) together with the
/// quadrature weights of both directions. `sdim` is the dimension entering the
/// fractional-seminorm exponent (1 for an interval or a boundary-curve
/// pullback, 2 for planar domains); distances between boundary nodes are chord
/// distances since the coordinates live in the ambient plane.
struct GridFunction {
  SpatialLayout layout = SpatialLayout::interval;
  int sdim = 1;
  std::vector<Vec> coords;
  std::vector<double> weights;
  std::array<int, 2> shape{0, 1};
  std::array<double, 2> spacing{0.0, 0.0};
  std::vector<double> rcoord;  // polar layout: radius per axis-0 index
  std::vector<double> tnodes;
  std::vector<double> tweights;
  std::vector<double> values;  // (time, spatial) row-major

  int spatial_count() const { return static_cast<int>(coords.size()); }
  int time_count() const { return static_cast<int>(tnodes.size()); }
  double at(int m, int i) const {
    return values[static_cast<std::size_t>(m) * coords.size() + i];
  }
  double& at(int m, int i) {
    return values[static_cast<std::size_t>(m) * coords.size() + i];
  }
};

GridFunction make_interval_grid(double a, double b, int nodes, double T,
                                int steps);
GridFunction make_circle_grid(double radius, int nodes, double T, int steps);
GridFunction make_box_grid(double x0, double x1, int nx, double y0, double y1,
                           int ny, double T, int steps);
GridFunction make_polar_disk_grid(double r0, double r1, int nr, int ntheta,
                                  double T, int steps);

void fill_grid(GridFunction& g, const std::function<double(const Vec&, double)>& f);

/// Discrete ( int_0^T ( int |f|^p dx )^{q/p} dt )^{1/q}; q = inf takes the max
/// over time samples of the spatial L_p norm.
double lpq_norm(const GridFunction& f, double p, double q);

/// L_q in time of the W^alpha_p spatial norm (alpha in [0,1); alpha = 0 is
/// lpq_norm). The spatial norm is L_p plus the order-alpha fractional
/// seminorm with the diagonal excluded.
double lq_walpha_norm(const GridFunction& f, double p, double q, double alpha);

/// L_q in time of the full W^1_p spatial norm (function plus all first
/// derivatives, formed by grid difference stencils).
double lq_w1p_norm(const GridFunction& f, double p, double q);

/// Four-term anisotropic norm of Definition-2.5 type. Supports floor(r) <= 1
/// and floor(s) <= 1; requests beyond that raise std::invalid_argument.
NormBreakdown wrs_norm(const GridFunction& f, const NormParams& params);

/// Both sides of the general Minkowski inequality computed discretely with the
/// grid's weights, treating the spatial direction as the outer variable.
std::pair<double, double> minkowski_check(const GridFunction& f, double p);

}  // namespace heatlayer
