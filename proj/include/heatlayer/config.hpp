#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlayer/geometry.hpp"

namespace heatlayer {

/// All validation failures of a configuration, one message per violation,
/// each naming the offending section.key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  std::vector<std::string> violations;
};

struct RunConfig {
  struct Geometry {
    SurfaceKind kind = SurfaceKind::circle;
    int n = 2;
    double radius = 1.0;
    double halfwidth = 6.0;
  } geometry;

  struct Discretization {
    int M = 64;
    int K = 64;
    double T = 0.5;
  } discretization;

  struct Solver {
    double tolerance = 1e-8;
    int max_iterations = 200;
    int level = 0;  // 0: filled with n + 1
    bool time_marching = false;
  } solver;

  struct Norm {
    double r = 0.0;
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;  // "inf" accepted
    double alpha = 0.0;
  } norm;

  struct Experiment {
    std::string kind = "identities";
    std::uint64_t seed = 1234;
    int family_size = 20;
    int ladder = 2;
  } experiment;

  struct Data {
    std::string kind = "bump";  // zero | bump | constant | manufactured
    double amplitude = 1.0;
    double center = 0.0;   // bump center: angle on the circle, coordinate on a face
    double width = 3.0;    // bump width: concentration kappa / Gaussian sigma
    double ramp_time = 0.01;
    double x0_1 = 2.0;     // manufactured source
    double x0_2 = 0.0;
  } data;

  struct Io {
    std::string output_dir;  // empty: taken from the command line
    bool dump_kernel_table = false;
  } io;

  struct Targets {
    std::vector<double> xn{0.25, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> times{0.85, 0.9, 0.95, 1.0};
  } targets;
};

/// Parses the flat INI-style key = value text and validates every field,
/// reporting all violations at once. Unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text);

RunConfig parse_config_file(const std::string& path);

}  // namespace heatlayer
