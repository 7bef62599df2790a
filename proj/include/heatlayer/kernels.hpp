#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "heatlayer/geometry.hpp"
#include "heatlayer/grids.hpp"
#include "heatlayer/vec.hpp"

namespace heatlayer {

/// Fundamental solution of the heat equation,
///   Gamma(x,t) = (4 pi t)^{-n/2} exp(-|x|^2 / 4t)  for t > 0,  0 for t <= 0,
/// with n = x.dim. Underflowing exponents are clamped to an exact 0.
double gamma(const Vec& x, double t);

struct SpaceMultiIndex {
  std::array<int, 3> orders{0, 0, 0};
  int total() const { return orders[0] + orders[1] + orders[2]; }
};

/// Closed-form derivative  d^r_t D^s_x Gamma  for r + |s| <= 2; 0 for t <= 0.
double gamma_derivative(const Vec& x, double t, int time_order,
                        const SpaceMultiIndex& s);

/// Double-layer kernel of the density equation,
///   N(xi,t; eta,tau) = 2 d/dn_eta Gamma(xi - eta, t - tau)
///                    = [(xi - eta) . n_eta / lag] * Gamma(xi - eta, lag),
/// lag = t - tau; exactly 0 for lag <= 0.
double double_layer_kernel(const Vec& xi, const Vec& n_eta, const Vec& eta,
                           double lag);

/// Exact lag integral of the representation kernel d/dn_eta Gamma,
///   int_{s1}^{s2} (b / 2s) Gamma_n(d, s) ds,
/// where b = (x - eta) . n_eta and d2 = |x - eta|^2. These closed forms are
/// the product-integration weights that absorb the weak lag singularity
/// (n = 2 uses plain exponentials, n = 3 the lower incomplete gamma via erf).
double dlp_time_integral(double b, double d2, double s1, double s2, int n);

/// sup_{s>=0} s^r e^{-s} = r^r e^{-r}, with 0^0 = 1.
double sup_exponential_identity(double r);

/// Discretized kernel on node pairs times lag midpoints. `values` holds the
/// pointwise kernel N_l(xi_i, .; eta_j, .) at lag (k + 1/2) dt in (i, j, k)
/// row-major order; level 1 additionally carries the exact per-subinterval lag
/// integrals used by the causal operator, stored as (k, i, j).
struct KernelTable {
  int level = 1;
  int dim = 2;   // ambient n
  int nodes = 0; // M
  int steps = 0; // K
  double dt = 0.0;
  std::vector<double> values;
  std::vector<double> interval_integrals;  // level 1 only
  double sup_norm = 0.0;

  double lag(int k) const { return (k + 0.5) * dt; }
  double value(int i, int j, int k) const {
    return values[(static_cast<std::size_t>(i) * nodes + j) * steps + k];
  }
  double interval_integral(int k, int i, int j) const {
    return interval_integrals[(static_cast<std::size_t>(k) * nodes + i) * nodes + j];
  }
};

/// Level-1 table for the given surface rule and time grid.
KernelTable build_kernel_table(const SurfaceQuadrature& quad, const TimeGrid& grid,
                               int dim);

/// Space-time composition N_l = N_1 o N_{l-1}. For l >= n + 1 the sup norm of
/// the result stabilizes under time refinement (bounded-kernel regime).
KernelTable iterate_kernel(const KernelTable& prev, const KernelTable& base,
                           const SurfaceQuadrature& quad, const TimeGrid& grid);

/// Causal Volterra-Fredholm application
///   (A f)(xi_i, t_m) = int_0^{t_m} int_S N(xi_i, t_m; eta, tau) f(eta, tau),
/// using the level-1 product-integrated couplings.
DensityField apply_causal_operator(const KernelTable& level1,
                                   const SurfaceQuadrature& quad,
                                   const TimeGrid& grid, const DensityField& f);

/// Iterated right-hand side: g_1 = g and g_l = g + A g_{l-1}, so that the
/// iterated equation mu = g_l + A^l mu has the same solution as mu - A mu = g.
DensityField iterated_rhs(const DensityField& g, const KernelTable& level1,
                          const SurfaceQuadrature& quad, const TimeGrid& grid,
                          int level);

/// Binary dump: magic "HLKT", then u32 version, n, l, M, K (little-endian),
/// then the pointwise values as f64 in (i, j, m) row-major order. The time
/// step is carried by the run's grid, not the dump; load_kernel_table leaves
/// dt at 0 for the caller to fill.
void dump_kernel_table(const KernelTable& table, std::ostream& out);
void dump_kernel_table(const KernelTable& table, const std::string& path);
KernelTable load_kernel_table(std::istream& in);
KernelTable load_kernel_table(const std::string& path);

}  // namespace heatlayer
