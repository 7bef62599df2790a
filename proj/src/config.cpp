#include "heatlayer/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace heatlayer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Parser {
  std::vector<std::string> violations;

  bool parse_double(const std::string& path, const std::string& raw, double& out) {
    if (raw == "inf" || raw == "infinity") {
      out = std::numeric_limits<double>::infinity();
      return true;
    }
    try {
      std::size_t used = 0;
      out = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      violations.push_back(path + " is not a number: '" + raw + "'");
      return false;
    }
  }

  bool parse_int(const std::string& path, const std::string& raw, int& out) {
    try {
      std::size_t used = 0;
      out = std::stoi(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      violations.push_back(path + " is not an integer: '" + raw + "'");
      return false;
    }
  }

  bool parse_u64(const std::string& path, const std::string& raw,
                 std::uint64_t& out) {
    try {
      std::size_t used = 0;
      out = std::stoull(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      violations.push_back(path + " is not a non-negative integer: '" + raw + "'");
      return false;
    }
  }

  bool parse_bool(const std::string& path, const std::string& raw, bool& out) {
    if (raw == "true" || raw == "1") {
      out = true;
      return true;
    }
    if (raw == "false" || raw == "0") {
      out = false;
      return true;
    }
    violations.push_back(path + " is not a boolean: '" + raw + "'");
    return false;
  }

  bool parse_list(const std::string& path, const std::string& raw,
                  std::vector<double>& out) {
    out.clear();
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v;
      if (!parse_double(path, trim(item), v)) return false;
      out.push_back(v);
    }
    if (out.empty()) {
      violations.push_back(path + " must list at least one value");
      return false;
    }
    return true;
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error(v.empty() ? "invalid configuration"
                                   : "invalid configuration: " + v.front() +
                                         (v.size() > 1 ? " (and more)" : "")),
      violations(std::move(v)) {}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  Parser p;

  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        p.violations.push_back("line " + std::to_string(lineno) +
                               ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "geometry" && section != "discretization" &&
          section != "solver" && section != "norm" && section != "experiment" &&
          section != "data" && section != "io" && section != "targets")
        p.violations.push_back("unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.violations.push_back("line " + std::to_string(lineno) +
                             ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = section + "." + key;

    if (section == "geometry") {
      if (key == "kind") {
        if (value == "circle")
          cfg.geometry.kind = SurfaceKind::circle;
        else if (value == "sphere")
          cfg.geometry.kind = SurfaceKind::sphere;
        else if (value == "slab")
          cfg.geometry.kind = SurfaceKind::slab;
        else
          p.violations.push_back(path + " must be circle, sphere, or slab");
      } else if (key == "n")
        p.parse_int(path, value, cfg.geometry.n);
      else if (key == "radius")
        p.parse_double(path, value, cfg.geometry.radius);
      else if (key == "halfwidth")
        p.parse_double(path, value, cfg.geometry.halfwidth);
      else
        p.violations.push_back("unknown key " + path);
    } else if (section == "discretization") {
      if (key == "M")
        p.parse_int(path, value, cfg.discretization.M);
      else if (key == "K")
        p.parse_int(path, value, cfg.discretization.K);
      else if (key == "T")
        p.parse_double(path, value, cfg.discretization.T);
      else
        p.violations.push_back("unknown key " + path);
    } else if (section == "solver") {
      if (key == "tolerance")
        p.parse_double(path, value, cfg.solver.tolerance);
      else if (key == "max_iterations")
        p.parse_int(path, value, cfg.solver.max_iterations);
      else if (key == "level")
        p.parse_int(path, value, cfg.solver.level);
      else if (key == "method") {
        if (value == "neumann_series")
          cfg.solver.time_marching = false;
        else if (value == "time_marching")
          cfg.solver.time_marching = true;
        else
          p.violations.push_back(path +
                                 " must be neumann_series or time_marching");
      } else
        p.violations.push_back("unknown key " + path);
    } else if (section == "norm") {
      if (key == "r")
        p.parse_double(path, value, cfg.norm.r);
      else if (key == "s")
        p.parse_double(path, value, cfg.norm.s);
      else if (key == "p")
        p.parse_double(path, value, cfg.norm.p);
      else if (key == "q")
        p.parse_double(path, value, cfg.norm.q);
      else if (key == "alpha")
        p.parse_double(path, value, cfg.norm.alpha);
      else
        p.violations.push_back("unknown key " + path);
    } else if (section == "experiment") {
      if (key == "kind") {
        if (value == "identities" || value == "manufactured" ||
            value == "halfspace_ratio_i" || value == "halfspace_ratio_ii" ||
            value == "halfspace_ratio_iii" || value == "bounded_ratio")
          cfg.experiment.kind = value;
        else
          p.violations.push_back(path + " names an unknown experiment");
      } else if (key == "seed")
        p.parse_u64(path, value, cfg.experiment.seed);
      else if (key == "family_size")
        p.parse_int(path, value, cfg.experiment.family_size);
      else if (key == "ladder")
        p.parse_int(path, value, cfg.experiment.ladder);
      else
        p.violations.push_back("unknown key " + path);
    } else if (section == "data") {
      if (key == "kind") {
        if (value == "zero" || value == "bump" || value == "constant" ||
            value == "manufactured")
          cfg.data.kind = value;
        else
          p.violations.push_back(path +
                                 " must be zero, bump, constant, or manufactured");
      } else if (key == "amplitude")
        p.parse_double(path, value, cfg.data.amplitude);
      else if (key == "center")
        p.parse_double(path, value, cfg.data.center);
      else if (key == "width")
        p.parse_double(path, value, cfg.data.width);
      else if (key == "ramp_time")
        p.parse_double(path, value, cfg.data.ramp_time);
      else if (key == "x0_1")
        p.parse_double(path, value, cfg.data.x0_1);
      else if (key == "x0_2")
        p.parse_double(path, value, cfg.data.x0_2);
      else
        p.violations.push_back("unknown key " + path);
    } else if (section == "io") {
      if (key == "output_dir")
        cfg.io.output_dir = value;
      else if (key == "dump_kernel_table")
        p.parse_bool(path, value, cfg.io.dump_kernel_table);
      else
        p.violations.push_back("unknown key " + path);
    } else if (section == "targets") {
      if (key == "xn")
        p.parse_list(path, value, cfg.targets.xn);
      else if (key == "times")
        p.parse_list(path, value, cfg.targets.times);
      else
        p.violations.push_back("unknown key " + path);
    } else if (section.empty()) {
      p.violations.push_back("key '" + key + "' appears before any section");
    }
  }

  // Range validation; every rule reports its own section.key path.
  auto& v = p.violations;
  if (cfg.geometry.n < 2 || cfg.geometry.n > 3)
    v.push_back("geometry.n must be 2 or 3");
  if (!(cfg.geometry.radius > 0.0)) v.push_back("geometry.radius must be > 0");
  if (!(cfg.geometry.halfwidth > 0.0))
    v.push_back("geometry.halfwidth must be > 0");
  if (cfg.geometry.kind == SurfaceKind::circle && cfg.geometry.n != 2)
    v.push_back("geometry.kind circle requires geometry.n = 2");
  if (cfg.geometry.kind == SurfaceKind::sphere && cfg.geometry.n != 3)
    v.push_back("geometry.kind sphere requires geometry.n = 3");
  if (cfg.discretization.M < 4) v.push_back("discretization.M must be >= 4");
  if (cfg.discretization.K < 2) v.push_back("discretization.K must be >= 2");
  if (!(cfg.discretization.T > 0.0)) v.push_back("discretization.T must be > 0");
  if (!(cfg.solver.tolerance > 0.0)) v.push_back("solver.tolerance must be > 0");
  if (cfg.solver.max_iterations < 1)
    v.push_back("solver.max_iterations must be >= 1");
  if (cfg.solver.level < 0) v.push_back("solver.level must be >= 1 (or omitted)");
  if (cfg.norm.r < 0.0) v.push_back("norm.r must be >= 0");
  if (cfg.norm.s < 0.0) v.push_back("norm.s must be >= 0");
  if (cfg.norm.p < 1.0 || std::isinf(cfg.norm.p))
    v.push_back("norm.p must lie in [1, inf)");
  if (cfg.norm.q < 1.0) v.push_back("norm.q must be >= 1 (inf allowed)");
  if (cfg.norm.alpha < 0.0 || cfg.norm.alpha >= 1.0 / cfg.norm.p)
    v.push_back("norm.alpha must satisfy alpha < 1/p");
  if (cfg.experiment.family_size < 1)
    v.push_back("experiment.family_size must be >= 1");
  if (cfg.experiment.ladder < 2) v.push_back("experiment.ladder must be >= 2");
  if (cfg.data.kind != "zero" && !(cfg.data.ramp_time > 0.0))
    v.push_back(
        "data.ramp_time must be > 0 so the data vanishes at t = 0 "
        "(compatibility with the zero initial condition)");
  if (!(cfg.data.width > 0.0)) v.push_back("data.width must be > 0");
  for (double t : cfg.targets.times)
    if (!(t > 0.0)) v.push_back("targets.times entries must be > 0");
  for (double x : cfg.targets.xn)
    if (!(x > 0.0)) v.push_back("targets.xn entries must be > 0");

  if (cfg.solver.level == 0) cfg.solver.level = cfg.geometry.n + 1;

  if (!p.violations.empty()) throw ConfigError(std::move(p.violations));
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace heatlayer
