#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatlayer/geometry.hpp"
#include "heatlayer/grids.hpp"
#include "heatlayer/vec.hpp"

namespace heatlayer {

struct SpaceTimePoint {
  Vec x;
  double t = 0.0;
};

enum class DerivativeKind { none, tangential, normal };

/// Data callable phi(., tau). Surface-data contexts (jump_limit_check) pass
/// the full surface point in R^n; the half-space evaluator passes the lateral
/// coordinate y' in R^{n-1}.
using BoundaryData = std::function<double(const Vec&, double)>;

struct EvaluationRequest {
  std::vector<SpaceTimePoint> targets;  // strictly inside the domain, t in (0, T]
  DerivativeKind derivative = DerivativeKind::none;  // half-space evaluator only
  int tangential_axis = 0;
  double tolerance = 1e-6;  // successive-refinement agreement target near S
};

struct EvalResult {
  double value = 0.0;
  double est_error = 0.0;
  int refinements = 0;
  bool accuracy_warning = false;
};

/// Double-layer representation u(x,t) = int_0^t int_S dGamma/dn_eta mu dS dtau
/// evaluated by surface quadrature with exact lag integration per subinterval.
/// Targets closer to S than 3 local mesh widths trigger geometric refinement
/// (factor 2, up to 8 levels) of the surface rule and of the lag subdivision
/// near lag 0 until two successive levels agree within req.tolerance.
std::vector<EvalResult> evaluate_interior(const DensityField& mu, const Boundary& b,
                                          const SurfaceQuadrature& quad,
                                          const TimeGrid& grid,
                                          const EvaluationRequest& req);

struct JumpCheckResult {
  double interior_limit = 0.0;   // extrapolated d -> 0 value of u(xi - d n, t)
  double boundary_value = 0.0;   // phi(xi, t)
  bool monotone = true;          // extrapolation sequence behaved
  std::vector<double> samples;   // u at the probed offsets
};

/// Probes u at xi - d n(xi) for a decreasing sequence of offsets and
/// extrapolates to the boundary; the limit should match the Dirichlet trace.
JumpCheckResult jump_limit_check(const DensityField& mu, const Boundary& b,
                                 const SurfaceQuadrature& quad, const TimeGrid& grid,
                                 const Vec& xi, double t, const BoundaryData& phi);

struct HalfSpaceOptions {
  double truncation_radius = 0.0;  // 0: use 12 * max(sqrt(t), 1)
  int time_intervals = 48;
  double lateral_spacing_cap = 0.1;
  int max_lateral_points = 512;  // per axis
  bool estimate_error = true;
};

/// Poisson formula for the half-space x_n > 0,
///   u(x,t) = (4 pi)^{-n/2} int_0^t int_{R^{n-1}}
///            x_n (t-tau)^{-(n+2)/2} e^{-(|x'-y'|^2 + x_n^2)/4(t-tau)} phi(y',tau),
/// with the x_n factor integrated exactly in the lag (erfc antiderivatives) and
/// the lateral Gaussian integrated on a per-interval adaptive grid. Derivative
/// variants differentiate the closed-form kernel.
EvalResult half_space_evaluate(const BoundaryData& phi, int n, const Vec& x,
                               double t,
                               DerivativeKind derivative = DerivativeKind::none,
                               int tangential_axis = 0,
                               const HalfSpaceOptions& opt = {});

/// Quadrature of int_{R^{n-1}} e^{-|y'|^2/4t} dy', which must reproduce the
/// closed form (4 pi t)^{(n-1)/2}.
double kernel_mass_identity(double t, double x_n, int n);

/// Streams results as CSV: x coordinates, t, value, est_error, refinements.
std::string evaluation_csv(const std::vector<SpaceTimePoint>& targets,
                           const std::vector<EvalResult>& results, int dim);

}  // namespace heatlayer
