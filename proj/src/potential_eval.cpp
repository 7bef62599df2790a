#include "heatlayer/potential_eval.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "heatlayer/kernels.hpp"
#include "heatlayer/util.hpp"

namespace heatlayer {

namespace {

constexpr double kPi = std::numbers::pi;

double catmull_rom(double p0, double p1, double p2, double p3, double f) {
  return 0.5 * (2.0 * p1 + (-p0 + p2) * f +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f * f +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * f * f * f);
}

// Uniform periodic samples v[j] at positions j = 0..M-1, evaluated at real x.
double interp_periodic(const double* v, int M, double x) {
  x -= std::floor(x / M) * M;
  const int i = static_cast<int>(std::floor(x));
  const double f = x - i;
  auto at = [&](int k) { return v[((k % M) + M) % M]; };
  return catmull_rom(at(i - 1), at(i), at(i + 1), at(i + 2), f);
}

double interp_clamped(const double* v, int M, double x) {
  if (x <= 0.0) x = 0.0;
  if (x >= M - 1) x = M - 1;
  const int i = std::min(static_cast<int>(std::floor(x)), M - 2);
  const double f = x - i;
  auto at = [&](int k) { return v[std::clamp(k, 0, M - 1)]; };
  return catmull_rom(at(i - 1), at(i), at(i + 1), at(i + 2), f);
}

struct PairGeometry {
  std::vector<double> b;   // (x - xi_j) . n_j
  std::vector<double> d2;  // |x - xi_j|^2
};

PairGeometry pair_geometry(const SurfaceQuadrature& quad, const Vec& x) {
  const int M = quad.node_count();
  PairGeometry g;
  g.b.resize(M);
  g.d2.resize(M);
  for (int j = 0; j < M; ++j) {
    const Vec r = x - quad.nodes[j];
    g.b[j] = dot(r, quad.normals[j]);
    g.d2[j] = r.norm2();
  }
  return g;
}

// One lag piece [s1, s2] <-> tau in [t - s2, t - s1]; density endpoint values
// interpolated in time from the rows of `mu` sampled on the evaluation rule.
double evaluate_once(const SurfaceQuadrature& quad, const std::vector<double>& mu,
                     int K, double dt, const Vec& x, double t, int n,
                     int near_subsplit) {
  const int M = quad.node_count();
  const PairGeometry geo = pair_geometry(quad, x);

  auto mu_at_time = [&](double tau, int j) {
    const double pos = tau / dt;
    int a = static_cast<int>(std::floor(pos));
    a = std::clamp(a, 0, K - 1);
    const double f = pos - a;
    const std::size_t row0 = static_cast<std::size_t>(a) * M;
    const std::size_t row1 = static_cast<std::size_t>(a + 1) * M;
    return (1.0 - f) * mu[row0 + j] + f * mu[row1 + j];
  };

  // Lag piece boundaries: full time-grid subintervals below t, with the piece
  // touching lag 0 split geometrically when requested.
  std::vector<double> lag_edges;  // ascending, starting at 0
  lag_edges.push_back(0.0);
  const double first = std::min(dt, t);
  if (near_subsplit > 0) {
    for (int p = near_subsplit; p >= 1; --p)
      lag_edges.push_back(first * std::ldexp(1.0, -p));
  }
  lag_edges.push_back(first);
  for (double s = first + dt; s < t - 1e-12 * dt; s += dt) lag_edges.push_back(s);
  if (lag_edges.back() < t) lag_edges.push_back(t);

  double acc = 0.0;
  for (std::size_t e = 0; e + 1 < lag_edges.size(); ++e) {
    const double s1 = lag_edges[e];
    const double s2 = lag_edges[e + 1];
    const double smid = 0.5 * (s1 + s2);
    const double tau_mid = t - smid;
    for (int j = 0; j < M; ++j) {
      const double J = dlp_time_integral(geo.b[j], geo.d2[j], s1, s2, n);
      if (J != 0.0) acc += quad.weights[j] * J * mu_at_time(tau_mid, j);
    }
  }
  return acc;
}

// Refined surface rule (factor x node count) with the density resampled onto
// it; supported for the circle and the 2-d slab face where the parameter line
// is uniform. Other kinds refine in time only.
std::optional<std::pair<SurfaceQuadrature, std::vector<double>>> refine_rule(
    const Boundary& b, const SurfaceQuadrature& base, const DensityField& mu,
    int factor) {
  const int M = base.node_count();
  const int K = mu.steps;
  if (b.kind.kind == SurfaceKind::circle) {
    const int Mr = M * factor;
    const double R = b.kind.radius;
    SurfaceQuadrature q;
    q.nodes.reserve(Mr);
    for (int j = 0; j < Mr; ++j) {
      const double th = 2.0 * kPi * j / Mr;
      q.nodes.push_back(Vec{R * std::cos(th), R * std::sin(th)});
      q.normals.push_back(Vec{std::cos(th), std::sin(th)});
      q.weights.push_back(2.0 * kPi * R / Mr);
    }
    q.spacing_hint = 2.0 * kPi * R / Mr;
    std::vector<double> vals(static_cast<std::size_t>(K + 1) * Mr);
    for (int m = 0; m <= K; ++m) {
      const double* row = &mu.values[static_cast<std::size_t>(m) * M];
      for (int j = 0; j < Mr; ++j)
        vals[static_cast<std::size_t>(m) * Mr + j] =
            interp_periodic(row, M, static_cast<double>(j) / factor);
    }
    return std::make_pair(std::move(q), std::move(vals));
  }
  if (b.kind.kind == SurfaceKind::slab && b.dim == 2) {
    const int Mr = M * factor;
    const double L = b.kind.halfwidth;
    const double h = 2.0 * L / Mr;
    SurfaceQuadrature q;
    for (int j = 0; j < Mr; ++j) {
      q.nodes.push_back(Vec{-L + (j + 0.5) * h, 0.0});
      q.normals.push_back(Vec{0.0, -1.0});
      q.weights.push_back(h);
    }
    q.spacing_hint = h;
    const double hb = 2.0 * L / M;
    std::vector<double> vals(static_cast<std::size_t>(K + 1) * Mr);
    for (int m = 0; m <= K; ++m) {
      const double* row = &mu.values[static_cast<std::size_t>(m) * M];
      for (int j = 0; j < Mr; ++j) {
        const double y = -L + (j + 0.5) * h;
        vals[static_cast<std::size_t>(m) * Mr + j] =
            interp_clamped(row, M, (y + L) / hb - 0.5);
      }
    }
    return std::make_pair(std::move(q), std::move(vals));
  }
  return std::nullopt;
}

}  // namespace

std::vector<EvalResult> evaluate_interior(const DensityField& mu, const Boundary& b,
                                          const SurfaceQuadrature& quad,
                                          const TimeGrid& grid,
                                          const EvaluationRequest& req) {
  if (req.derivative != DerivativeKind::none)
    throw std::invalid_argument(
        "evaluate_interior: derivatives are provided by the half-space evaluator");
  if (mu.nodes != quad.node_count() || mu.steps != grid.steps)
    throw std::invalid_argument("evaluate_interior: grid mismatch");
  const int n = b.dim;
  const int K = grid.steps;
  const double dt = grid.dt();
  // Scale for the refinement stopping rule, restricted to the causal past of
  // the latest target so future rows cannot influence any value.
  auto causal_scale = [&](double t) {
    const int last = std::min(
        K, static_cast<int>(std::ceil(t / dt - 1e-12)));
    double s = 0.0;
    for (int m = 0; m <= last; ++m)
      for (int j = 0; j < mu.nodes; ++j) s = std::max(s, std::abs(mu.at(m, j)));
    return s;
  };

  std::vector<EvalResult> results(req.targets.size());
  parallel_for(req.targets.size(), [&](std::size_t ti) {
    const SpaceTimePoint& tp = req.targets[ti];
    const double dist = b.signed_distance(tp.x);
    if (!(dist > 0.0))
      throw std::domain_error("evaluate_interior: target on or outside S");
    if (!(tp.t > 0.0) || tp.t > grid.horizon * (1.0 + 1e-12))
      throw std::domain_error("evaluate_interior: target time outside (0, T]");

    EvalResult res;
    const bool near = dist < 3.0 * quad.spacing_hint;
    double u = evaluate_once(quad, mu.values, K, dt, tp.x, tp.t, n, near ? 8 : 0);
    if (near) {
      const double scale = std::max(std::abs(u), 0.01 * causal_scale(tp.t));
      double prev = u;
      bool settled = false;
      for (int level = 1; level <= 8; ++level) {
        auto refined = refine_rule(b, quad, mu, 1 << level);
        double ul;
        if (refined)
          ul = evaluate_once(refined->first, refined->second, K, dt, tp.x, tp.t, n,
                             8 + 2 * level);
        else
          ul = evaluate_once(quad, mu.values, K, dt, tp.x, tp.t, n, 8 + 2 * level);
        res.refinements = level;
        res.est_error = std::abs(ul - prev);
        u = ul;
        if (res.est_error <= req.tolerance * scale) {
          settled = true;
          break;
        }
        prev = ul;
      }
      res.accuracy_warning = !settled;
    }
    res.value = u;
    results[ti] = res;
  });
  return results;
}

JumpCheckResult jump_limit_check(const DensityField& mu, const Boundary& b,
                                 const SurfaceQuadrature& quad, const TimeGrid& grid,
                                 const Vec& xi, double t, const BoundaryData& phi) {
  const Vec nrm = outward_normal(b, xi);
  const double h = quad.spacing_hint;

  EvaluationRequest req;
  req.tolerance = 1e-5;
  for (double c : {1.0, 0.5, 0.25, 0.125})
    req.targets.push_back({xi - (c * h) * nrm, t});
  const auto vals = evaluate_interior(mu, b, quad, grid, req);

  JumpCheckResult out;
  for (const auto& v : vals) out.samples.push_back(v.value);
  // u(xi - d n) = L + c d + O(d^2): eliminate the linear term from the two
  // smallest offsets.
  const double u2 = out.samples[2], u3 = out.samples[3];
  out.interior_limit = 2.0 * u3 - u2;
  const double l = out.interior_limit;
  out.monotone = true;
  for (std::size_t k = 0; k + 1 < out.samples.size(); ++k)
    if (std::abs(out.samples[k + 1] - l) >
        std::abs(out.samples[k] - l) + 1e-12 * std::abs(l))
      out.monotone = false;

  out.boundary_value = phi(xi, t);
  return out;
}

EvalResult half_space_evaluate(const BoundaryData& phi, int n, const Vec& x,
                               double t, DerivativeKind derivative,
                               int tangential_axis, const HalfSpaceOptions& opt) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("half_space_evaluate: n must be 2 or 3");
  const double xn = x[n - 1];
  if (!(xn > 0.0))
    throw std::domain_error("half_space_evaluate: target must satisfy x_n > 0");
  if (!(t > 0.0)) throw std::domain_error("half_space_evaluate: t must be > 0");

  const double trunc =
      opt.truncation_radius > 0.0 ? opt.truncation_radius
                                  : 12.0 * std::max(std::sqrt(t), 1.0);
  if (std::exp(-trunc * trunc / (4.0 * t)) > 1e-6)
    throw std::runtime_error(
        "half_space_evaluate: truncation radius too small for the requested time");

  auto run = [&](int intervals) {
    // Lag edges graded quadratically toward both endpoints: s -> 0 carries the
    // kernel concentration, s -> t the most recent data variation.
    std::vector<double> edges(intervals + 1);
    for (int j = 0; j <= intervals; ++j) {
      const double half = 0.5 * intervals;
      if (j <= intervals / 2) {
        const double z = j / half;
        edges[j] = 0.5 * t * z * z;
      } else {
        const double z = (intervals - j) / half;
        edges[j] = t - 0.5 * t * z * z;
      }
    }

    auto lag_weight = [&](double s1, double s2) {
      // int_{s1}^{s2} x_n/(2 sqrt(pi)) s^{-3/2} e^{-x_n^2/4s} ds
      //   = erfc(x_n/(2 sqrt(s2))) - erfc(x_n/(2 sqrt(s1))).
      const double w2 = std::erfc(xn / (2.0 * std::sqrt(s2)));
      const double w1 = s1 > 0.0 ? std::erfc(xn / (2.0 * std::sqrt(s1))) : 0.0;
      return w2 - w1;
    };
    auto lag_weight_dxn = [&](double s1, double s2) {
      auto g = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double z = xn * xn / (4.0 * s);
        return z > 700.0 ? 0.0 : -std::exp(-z) / std::sqrt(kPi * s);
      };
      return g(s2) - g(s1);
    };

    double acc = 0.0;
    for (int j = 0; j < intervals; ++j) {
      const double s1 = edges[j], s2 = edges[j + 1];
      if (s2 <= s1) continue;
      const double wq = derivative == DerivativeKind::normal
                            ? lag_weight_dxn(s1, s2)
                            : lag_weight(s1, s2);
      if (wq == 0.0) continue;
      const double smid = 0.5 * (s1 + s2);
      const double tau = t - smid;

      // Lateral integral of G_{n-1}(x'-y, smid) [optionally differentiated]
      // against phi(., tau) on a window resolving the Gaussian width.
      const double width = std::sqrt(smid);
      const double rho = std::min(trunc, 12.0 * width);
      const double target_spacing = std::min(0.7 * width, opt.lateral_spacing_cap);
      int pts = static_cast<int>(std::ceil(2.0 * rho / target_spacing));
      pts = std::clamp(pts, 8, opt.max_lateral_points);
      const double dl = 2.0 * rho / pts;
      const double inv4s = 1.0 / (4.0 * smid);
      const double gpref = std::pow(4.0 * kPi * smid, -0.5 * (n - 1));

      double lat = 0.0;
      if (n == 2) {
        for (int i = 0; i < pts; ++i) {
          const double y = x[0] - rho + (i + 0.5) * dl;
          const double r = x[0] - y;
          const double z = r * r * inv4s;
          if (z > 700.0) continue;
          double ker = gpref * std::exp(-z);
          if (derivative == DerivativeKind::tangential)
            ker *= -r / (2.0 * smid);  // d/dx' of the lateral Gaussian
          lat += ker * phi(Vec(y), tau) * dl;
        }
      } else {
        for (int i1 = 0; i1 < pts; ++i1) {
          const double y1 = x[0] - rho + (i1 + 0.5) * dl;
          for (int i2 = 0; i2 < pts; ++i2) {
            const double y2 = x[1] - rho + (i2 + 0.5) * dl;
            const double r1 = x[0] - y1, r2 = x[1] - y2;
            const double z = (r1 * r1 + r2 * r2) * inv4s;
            if (z > 700.0) continue;
            double ker = gpref * std::exp(-z);
            if (derivative == DerivativeKind::tangential) {
              const double rr = tangential_axis == 0 ? r1 : r2;
              ker *= -rr / (2.0 * smid);
            }
            lat += ker * phi(Vec{y1, y2}, tau) * dl * dl;
          }
        }
      }
      acc += wq * lat;
    }
    return acc;
  };

  EvalResult res;
  const double fine = run(opt.time_intervals);
  res.value = fine;
  if (opt.estimate_error) {
    const double coarse = run(std::max(8, opt.time_intervals / 2));
    res.est_error = std::abs(fine - coarse);
    res.refinements = 1;
  }
  return res;
}

double kernel_mass_identity(double t, double x_n, int n) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel_mass_identity: t > 0");
  if (!(x_n > 0.0)) throw std::invalid_argument("kernel_mass_identity: x_n > 0");
  if (n != 2 && n != 3)
    throw std::invalid_argument("kernel_mass_identity: n must be 2 or 3");

  const double L = 14.0 * std::sqrt(t);
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(16, gl_nodes, gl_weights);

  auto composite_1d = [&](int panels) {
    double s = 0.0;
    const double h = 2.0 * L / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
      const double a = -L + pnl * h;
      for (std::size_t g = 0; g < gl_nodes.size(); ++g) {
        const double y = a + 0.5 * h * (gl_nodes[g] + 1.0);
        s += 0.5 * h * gl_weights[g] * std::exp(-y * y / (4.0 * t));
      }
    }
    return s;
  };

  double prev = 0.0;
  for (int panels : {8, 16, 32, 64, 128}) {
    const double one_d = composite_1d(panels);
    const double val = n == 2 ? one_d : one_d * one_d;
    if (panels > 8 && std::abs(val - prev) <= 1e-10 * std::max(1.0, std::abs(val)))
      return val;
    prev = val;
  }
  return prev;
}

std::string evaluation_csv(const std::vector<SpaceTimePoint>& targets,
                           const std::vector<EvalResult>& results, int dim) {
  std::vector<std::string> header;
  for (int i = 0; i < dim; ++i) header.push_back("x" + std::to_string(i + 1));
  header.insert(header.end(), {"t", "value", "est_error", "refinements"});
  CsvBuilder csv(header);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::vector<double> row;
    for (int d = 0; d < dim; ++d) row.push_back(targets[i].x[d]);
    row.push_back(targets[i].t);
    row.push_back(results[i].value);
    row.push_back(results[i].est_error);
    row.push_back(static_cast<double>(results[i].refinements));
    csv.add_row(row);
  }
  return csv.str();
}

}  // namespace heatlayer
