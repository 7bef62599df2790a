#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heatlayer/vec.hpp"

namespace heatlayer {

enum class SurfaceKind { circle, sphere, slab, graph };

/// Analytic description of which closed surface to build. `radius` is the
/// circle/sphere radius; `halfwidth` is the truncation extent of the slab
/// face (the flat face stands in for the unbounded plane x_n = 0).
struct BoundaryKind {
  SurfaceKind kind = SurfaceKind::circle;
  int dim = 2;  // ambient dimension n
  double radius = 1.0;
  double halfwidth = 6.0;
};

/// One parametrization patch of the surface. For graph charts the surface is
/// x_n = f(y') over the reference rectangle [lo, hi] in R^{n-1}, and the
/// surface measure weight is sqrt(1 + |grad f|^2).
struct BoundaryChart {
  std::function<Vec(const Vec&)> param_map;          // R^{n-1} patch -> R^n
  std::function<double(const Vec&)> graph_f;          // f(y'), graph charts
  std::function<Vec(const Vec&)> graph_grad;          // grad f(y')
  Vec patch_lo;
  Vec patch_hi;
};

struct Boundary {
  BoundaryKind kind;
  int dim = 2;
  std::vector<BoundaryChart> charts;
  // Smooth nonnegative weights per chart, summing to 1 on overlaps.
  std::vector<std::function<double(const Vec&)>> partition_weights;

  double diameter() const;
  /// Signed distance to S, positive inside the domain the surface bounds.
  double signed_distance(const Vec& x) const;
  /// Warning text when a graph chart looks rougher than C^2 (the kernel
  /// boundedness needs (xi-eta)*n_eta = O(|xi-eta|^2) near the diagonal).
  std::optional<std::string> smoothness_warning;
};

struct SurfaceQuadrature {
  std::vector<Vec> nodes;
  std::vector<Vec> normals;      // unit outward
  std::vector<double> weights;   // approximate dS
  // Diagonal limit lim_{eta->xi} (xi - eta).n_eta / |xi - eta|^2 along S
  // (-1/(2R) on a circle or sphere, 0 on a flat face). The lag-integrated
  // kernel keeps a finite diagonal value proportional to this ratio.
  std::vector<double> diag_ratio;
  double spacing_hint = 0.0;     // max local node spacing, used by near-field logic

  int node_count() const { return static_cast<int>(nodes.size()); }
  double total_weight() const;
};

/// Builds the surface and its quadrature rule. Circle: equispaced periodic
/// rule (spectral for smooth integrands). Sphere: Gauss-Legendre in cos(theta)
/// times equispaced azimuth, poles excluded. Slab: midpoint rule on the
/// truncated face. resolution >= 4; the node count scales with it per kind.
std::pair<Boundary, SurfaceQuadrature> build_boundary(const BoundaryKind& kind,
                                                      int resolution);

/// Same, for a caller-supplied graph chart f over [lo, hi]^{n-1}.
std::pair<Boundary, SurfaceQuadrature> build_graph_boundary(
    int dim, std::function<double(const Vec&)> f,
    std::function<Vec(const Vec&)> grad_f, const Vec& lo, const Vec& hi,
    int resolution);

/// Unit outward normal at a point of S. Throws std::domain_error when xi is
/// farther from S than 1e-9 * diameter.
Vec outward_normal(const Boundary& b, const Vec& xi);

/// Boundary straightening z' = y', z_n = y_n - f(y') and its inverse.
Vec straighten(const BoundaryChart& chart, const Vec& y);
Vec unstraighten(const BoundaryChart& chart, const Vec& z);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace heatlayer
