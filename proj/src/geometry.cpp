#include "heatlayer/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatlayer {

namespace {

constexpr double kPi = std::numbers::pi;

void check_resolution(int resolution) {
  if (resolution < 4)
    throw std::invalid_argument("build_boundary: resolution must be >= 4");
}

// No two quadrature nodes may coincide (injectivity of the parametrization,
// sampled at the rule's nodes).
void check_injective(const SurfaceQuadrature& quad, double diam) {
  const double tol = 1e-12 * std::max(diam, 1.0);
  const int m = quad.node_count();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((quad.nodes[i] - quad.nodes[j]).norm() < tol)
        throw std::invalid_argument(
            "build_boundary: parametrization is not injective at the sampled nodes");
}

void check_unit_normals(const SurfaceQuadrature& quad) {
  for (const Vec& n : quad.normals)
    if (std::abs(n.norm() - 1.0) > 1e-12)
      throw std::logic_error("build_boundary: non-unit outward normal");
}

void check_partition(const Boundary& b, const SurfaceQuadrature& quad) {
  for (const Vec& xi : quad.nodes) {
    double s = 0.0;
    for (const auto& w : b.partition_weights) s += w(xi);
    if (std::abs(s - 1.0) > 1e-12)
      throw std::logic_error("build_boundary: partition weights do not sum to 1");
  }
}

}  // namespace

double SurfaceQuadrature::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double Boundary::diameter() const {
  switch (kind.kind) {
    case SurfaceKind::circle:
    case SurfaceKind::sphere:
      return 2.0 * kind.radius;
    case SurfaceKind::slab:
    case SurfaceKind::graph:
      return 2.0 * kind.halfwidth;
  }
  return 1.0;
}

double Boundary::signed_distance(const Vec& x) const {
  switch (kind.kind) {
    case SurfaceKind::circle:
    case SurfaceKind::sphere:
      return kind.radius - x.norm();  // positive inside the ball
    case SurfaceKind::slab:
      return x[dim - 1];  // positive in the half-space x_n > 0
    case SurfaceKind::graph: {
      Vec yp = zero_vec(dim - 1);
      for (int i = 0; i < dim - 1; ++i) yp[i] = x[i];
      return x[dim - 1] - charts.at(0).graph_f(yp);
    }
  }
  return 0.0;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

std::pair<Boundary, SurfaceQuadrature> build_boundary(const BoundaryKind& kind,
                                                      int resolution) {
  check_resolution(resolution);

  Boundary b;
  b.kind = kind;
  b.dim = kind.dim;
  SurfaceQuadrature quad;

  switch (kind.kind) {
    case SurfaceKind::circle: {
      if (kind.dim != 2)
        throw std::invalid_argument("build_boundary: circle requires n = 2");
      const int m = resolution;
      const double R = kind.radius;
      const double w = 2.0 * kPi * R / m;
      for (int j = 0; j < m; ++j) {
        const double th = 2.0 * kPi * j / m;
        const Vec p{R * std::cos(th), R * std::sin(th)};
        quad.nodes.push_back(p);
        quad.normals.push_back(Vec{std::cos(th), std::sin(th)});
        quad.weights.push_back(w);
      }
      quad.diag_ratio.assign(m, -1.0 / (2.0 * R));
      quad.spacing_hint = w;
      BoundaryChart chart;
      chart.patch_lo = Vec(0.0);
      chart.patch_hi = Vec(2.0 * kPi);
      chart.param_map = [R](const Vec& t) {
        return Vec{R * std::cos(t[0]), R * std::sin(t[0])};
      };
      b.charts.push_back(chart);
      b.partition_weights.push_back([](const Vec&) { return 1.0; });
      break;
    }
    case SurfaceKind::sphere: {
      if (kind.dim != 3)
        throw std::invalid_argument("build_boundary: sphere requires n = 3");
      const double R = kind.radius;
      const int npolar = resolution;
      const int nazim = 2 * resolution;
      std::vector<double> z, wz;
      gauss_legendre(npolar, z, wz);
      const double dphi = 2.0 * kPi / nazim;
      for (int a = 0; a < npolar; ++a) {
        const double rho = std::sqrt(std::max(0.0, 1.0 - z[a] * z[a]));
        for (int bp = 0; bp < nazim; ++bp) {
          const double phi = dphi * (bp + 0.5);
          const Vec unit{rho * std::cos(phi), rho * std::sin(phi), z[a]};
          quad.nodes.push_back(R * unit);
          quad.normals.push_back(unit);
          quad.weights.push_back(R * R * wz[a] * dphi);
        }
      }
      quad.diag_ratio.assign(quad.nodes.size(), -1.0 / (2.0 * R));
      quad.spacing_hint = std::max(R * dphi, 2.0 * R / npolar);
      BoundaryChart chart;
      chart.patch_lo = Vec{-1.0, 0.0};
      chart.patch_hi = Vec{1.0, 2.0 * kPi};
      chart.param_map = [R](const Vec& t) {
        const double rho = std::sqrt(std::max(0.0, 1.0 - t[0] * t[0]));
        return Vec{R * rho * std::cos(t[1]), R * rho * std::sin(t[1]), R * t[0]};
      };
      b.charts.push_back(chart);
      b.partition_weights.push_back([](const Vec&) { return 1.0; });
      break;
    }
    case SurfaceKind::slab: {
      // Truncated face x_n = 0 of the half-space x_n > 0. Outward is -e_n.
      const double L = kind.halfwidth;
      const int n = kind.dim;
      if (n != 2 && n != 3)
        throw std::invalid_argument("build_boundary: slab requires n in {2,3}");
      Vec normal = zero_vec(n);
      normal[n - 1] = -1.0;
      if (n == 2) {
        const int m = resolution;
        const double h = 2.0 * L / m;
        for (int j = 0; j < m; ++j) {
          quad.nodes.push_back(Vec{-L + (j + 0.5) * h, 0.0});
          quad.normals.push_back(normal);
          quad.weights.push_back(h);
        }
        quad.spacing_hint = h;
      } else {
        const int m = resolution;
        const double h = 2.0 * L / m;
        for (int j1 = 0; j1 < m; ++j1)
          for (int j2 = 0; j2 < m; ++j2) {
            quad.nodes.push_back(
                Vec{-L + (j1 + 0.5) * h, -L + (j2 + 0.5) * h, 0.0});
            quad.normals.push_back(normal);
            quad.weights.push_back(h * h);
          }
        quad.spacing_hint = h;
      }
      quad.diag_ratio.assign(quad.nodes.size(), 0.0);
      BoundaryChart chart;
      chart.patch_lo = zero_vec(n - 1);
      chart.patch_hi = zero_vec(n - 1);
      for (int i = 0; i < n - 1; ++i) {
        chart.patch_lo[i] = -L;
        chart.patch_hi[i] = L;
      }
      chart.graph_f = [](const Vec&) { return 0.0; };
      chart.graph_grad = [n](const Vec&) { return zero_vec(n - 1); };
      chart.param_map = [n](const Vec& yp) {
        Vec p = zero_vec(n);
        for (int i = 0; i < n - 1; ++i) p[i] = yp[i];
        return p;
      };
      b.charts.push_back(chart);
      b.partition_weights.push_back([](const Vec&) { return 1.0; });
      break;
    }
    case SurfaceKind::graph:
      throw std::invalid_argument(
          "build_boundary: graph charts are supplied through build_graph_boundary");
  }

  check_injective(quad, b.diameter());
  check_unit_normals(quad);
  check_partition(b, quad);
  return {b, quad};
}

std::pair<Boundary, SurfaceQuadrature> build_graph_boundary(
    int dim, std::function<double(const Vec&)> f,
    std::function<Vec(const Vec&)> grad_f, const Vec& lo, const Vec& hi,
    int resolution) {
  check_resolution(resolution);
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("build_graph_boundary: n in {2,3}");

  Boundary b;
  b.kind.kind = SurfaceKind::graph;
  b.kind.dim = dim;
  b.kind.halfwidth = 0.5 * (hi[0] - lo[0]);
  b.dim = dim;

  BoundaryChart chart;
  chart.graph_f = f;
  chart.graph_grad = grad_f;
  chart.patch_lo = lo;
  chart.patch_hi = hi;
  chart.param_map = [dim, f](const Vec& yp) {
    Vec p = zero_vec(dim);
    for (int i = 0; i < dim - 1; ++i) p[i] = yp[i];
    p[dim - 1] = f(yp);
    return p;
  };

  SurfaceQuadrature quad;
  const int m = resolution;
  auto push_node = [&](const Vec& yp, double cell) {
    const Vec g = grad_f(yp);
    const double jac = std::sqrt(1.0 + g.norm2());
    Vec node = chart.param_map(yp);
    // Outward from the domain x_n > f(y'): (grad f, -1)/sqrt(1+|grad f|^2).
    Vec nrm = zero_vec(dim);
    for (int i = 0; i < dim - 1; ++i) nrm[i] = g[i] / jac;
    nrm[dim - 1] = -1.0 / jac;
    quad.nodes.push_back(node);
    quad.normals.push_back(nrm);
    quad.weights.push_back(cell * jac);
  };
  if (dim == 2) {
    const double h = (hi[0] - lo[0]) / m;
    for (int j = 0; j < m; ++j) push_node(Vec(lo[0] + (j + 0.5) * h), h);
    quad.spacing_hint = h;
  } else {
    const double h1 = (hi[0] - lo[0]) / m;
    const double h2 = (hi[1] - lo[1]) / m;
    for (int j1 = 0; j1 < m; ++j1)
      for (int j2 = 0; j2 < m; ++j2)
        push_node(Vec{lo[0] + (j1 + 0.5) * h1, lo[1] + (j2 + 0.5) * h2}, h1 * h2);
    quad.spacing_hint = std::max(h1, h2);
  }

  // Curvature ratio estimated from the nearest sampled neighbour.
  {
    const int mm = quad.node_count();
    quad.diag_ratio.assign(mm, 0.0);
    for (int i = 0; i < mm; ++i) {
      const int nb = i + 1 < mm ? i + 1 : i - 1;
      const Vec d = quad.nodes[i] - quad.nodes[nb];
      const double d2 = d.norm2();
      if (d2 > 0.0) quad.diag_ratio[i] = dot(d, quad.normals[nb]) / d2;
    }
  }

  b.charts.push_back(chart);
  b.partition_weights.push_back([](const Vec&) { return 1.0; });

  // Rough C^2 probe: (xi-eta)*n_eta should shrink like |xi-eta|^2 between
  // neighbouring nodes; a large quotient flags a chart the kernel bounds
  // do not cover.
  double worst = 0.0;
  const int mm = quad.node_count();
  for (int i = 0; i + 1 < mm; ++i) {
    const Vec d = quad.nodes[i + 1] - quad.nodes[i];
    const double d2 = d.norm2();
    if (d2 > 0.0) worst = std::max(worst, std::abs(dot(d, quad.normals[i])) / d2);
  }
  // worst ~ kappa/2; the kernel bounds need the normal to turn little
  // between neighbouring nodes (kappa * h well below 1).
  if (worst * quad.spacing_hint > 0.5)
    b.smoothness_warning =
        "graph chart appears rougher than C^2 at the sampled resolution";

  check_injective(quad, std::max(b.diameter(), 1.0));
  check_unit_normals(quad);
  check_partition(b, quad);
  return {b, quad};
}

Vec outward_normal(const Boundary& b, const Vec& xi) {
  const double tol = 1e-9 * b.diameter();
  if (std::abs(b.signed_distance(xi)) > tol)
    throw std::domain_error("outward_normal: point is not on the surface");
  switch (b.kind.kind) {
    case SurfaceKind::circle:
    case SurfaceKind::sphere: {
      const double r = xi.norm();
      return (1.0 / r) * xi;
    }
    case SurfaceKind::slab: {
      Vec n = zero_vec(b.dim);
      n[b.dim - 1] = -1.0;
      return n;
    }
    case SurfaceKind::graph: {
      Vec yp = zero_vec(b.dim - 1);
      for (int i = 0; i < b.dim - 1; ++i) yp[i] = xi[i];
      const Vec g = b.charts.at(0).graph_grad(yp);
      const double jac = std::sqrt(1.0 + g.norm2());
      Vec n = zero_vec(b.dim);
      for (int i = 0; i < b.dim - 1; ++i) n[i] = g[i] / jac;
      n[b.dim - 1] = -1.0 / jac;
      return n;
    }
  }
  throw std::logic_error("outward_normal: unknown kind");
}

Vec straighten(const BoundaryChart& chart, const Vec& y) {
  Vec z = y;
  Vec yp = zero_vec(y.dim - 1);
  for (int i = 0; i < y.dim - 1; ++i) yp[i] = y[i];
  z[y.dim - 1] = y[y.dim - 1] - chart.graph_f(yp);
  return z;
}

Vec unstraighten(const BoundaryChart& chart, const Vec& z) {
  Vec y = z;
  Vec yp = zero_vec(z.dim - 1);
  for (int i = 0; i < z.dim - 1; ++i) yp[i] = z[i];
  y[z.dim - 1] = z[z.dim - 1] + chart.graph_f(yp);
  return y;
}

}  // namespace heatlayer
