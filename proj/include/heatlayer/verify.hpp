#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "heatlayer/geometry.hpp"
#include "heatlayer/grids.hpp"
#include "heatlayer/kernels.hpp"
#include "heatlayer/potential_eval.hpp"
#include "heatlayer/vec.hpp"

namespace heatlayer {

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_pass = true;
  std::string to_csv() const;
};

/// Heat-kernel moment integrals (mass 1, first derivatives 0), the
/// sup-exponential identity against a grid-search oracle, and the lateral
/// Gaussian mass closed form.
IdentityReport run_identities();

struct ManufacturedSpec {
  double radius = 1.0;
  double T = 0.5;
  Vec source{2.0, 0.0};  // center of the exact solution, outside the closure
  int M = 64;
  int K = 64;
  int ladder = 2;  // refinement levels, coarsest first, doubling up to (M, K)
  int level = 0;   // iteration level; 0 selects n + 1
  double tolerance = 1e-8;
};

struct ErrorTable {
  struct Row {
    int level = 0;
    int M = 0;
    int K = 0;
    double max_rel = 0.0;
    double mean_rel = 0.0;
  };
  std::vector<Row> rows;
  std::string to_csv() const;
};

/// Solves the circle problem with boundary data equal to the trace of
/// Gamma(. - source, .) and compares the evaluated interior solution against
/// that exact field, per refinement level.
ErrorTable run_manufactured(const ManufacturedSpec& spec);

struct HalfSpaceFamilySpec {
  double p = 1.0;
  double q = std::numeric_limits<double>::infinity();
  double alpha = 0.0;
  double T = 1.0;
  int family_size = 20;
  std::uint64_t seed = 1234;
  int grid_lateral = 48;
  int grid_normal = 32;
  int grid_time = 16;
  int time_intervals = 48;
  DerivativeKind derivative = DerivativeKind::none;  // selects the value, tangential, or normal-derivative estimate
};

struct RatioTable {
  struct Row {
    int member = 0;
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    std::string label;
  };
  std::vector<Row> rows;
  double max_ratio = 0.0;
  double reference_constant = 0.0;  // explicit alpha = 0 constant, when defined
  std::string to_csv() const;
};

/// Ratio experiment over a seeded bump family in the half-space: measures
/// norm(u-side) / norm(phi-side) for the selected half-space estimate.
RatioTable run_halfspace_ratio(const HalfSpaceFamilySpec& spec);

struct BoundedRatioSpec {
  double p = 2.0;
  double q = 2.0;
  double T = 0.5;
  double radius = 1.0;
  int family_size = 10;
  std::uint64_t seed = 4321;
  int M = 64;
  int K = 64;
  int levels = 2;  // second level doubles M and K
  double tolerance = 1e-8;
};

struct StabilityTable {
  std::vector<RatioTable> per_level;
  std::vector<double> max_ratios;
  double rel_change = 0.0;
  std::string to_csv() const;
};

/// Bounded-domain ratio experiment on the circle: solves for mu per family
/// member, measures ||u||_{L_q(0,T;W^1_p)} over the boundary-data norm pair,
/// and reports the stability of the family maximum across one refinement.
StabilityTable run_bounded_ratio(const BoundedRatioSpec& spec);

/// 0 below 0, z^2(3 - 2z) on [0,1], 1 beyond: the compatibility ramp of all
/// data families.
double smoothstep_ramp(double z);

struct HalfSpaceBump {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 0.5;
  double ramp_time = 0.1;
  double operator()(const Vec& y, double tau) const;
};
std::vector<HalfSpaceBump> make_halfspace_family(std::uint64_t seed, int size);

struct CircleBump {
  double amplitude = 1.0;
  double kappa = 3.0;
  double theta0 = 0.0;
  double ramp_time = 0.1;
  double operator()(const Vec& xi, double tau) const;
};
std::vector<CircleBump> make_circle_family(std::uint64_t seed, int size);

/// Level-l kernel table obtained by composing the level-1 table (l - 1) times.
KernelTable build_iterated_table(const KernelTable& base,
                                 const SurfaceQuadrature& quad,
                                 const TimeGrid& grid, int level);

}  // namespace heatlayer
